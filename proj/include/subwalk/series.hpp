#pragma once

// Truncated power series in 256-bit binary floating point.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstddef>
#include <vector>

namespace subwalk::series {

using Real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

using Series = std::vector<Real>;

/// f^p for f[0] != 0, truncated to f.size() terms.
Series power(const Series& f, const Real& p);
/// log f for f[0] > 0.
Series log(const Series& f);
/// Truncated product, length = min(a.size(), b.size()).
Series multiply(const Series& a, const Series& b);

}  // namespace subwalk::series
