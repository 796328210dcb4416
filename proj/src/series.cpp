#include "subwalk/series.hpp"

#include <algorithm>
#include <stdexcept>

namespace subwalk::series {

Series power(const Series& f, const Real& p) {
  if (f.empty()) return {};
  if (f[0] == 0) throw std::invalid_argument("series::power needs a nonzero constant term");
  const std::size_t n = f.size();
  Series g(n);
  g[0] = boost::multiprecision::pow(f[0], p);
  // Miller recurrence: n f0 g_n = sum_{k=1}^n (p k - (n - k)) f_k g_{n-k}
  for (std::size_t m = 1; m < n; ++m) {
    Real acc = 0;
    for (std::size_t k = 1; k <= m; ++k) {
      if (f[k] == 0) continue;
      acc += (p * Real(k) - Real(m - k)) * f[k] * g[m - k];
    }
    g[m] = acc / (Real(m) * f[0]);
  }
  return g;
}

Series log(const Series& f) {
  if (f.empty()) return {};
  if (f[0] <= 0) throw std::invalid_argument("series::log needs a positive constant term");
  const std::size_t n = f.size();
  Series h(n);
  h[0] = boost::multiprecision::log(f[0]);
  for (std::size_t m = 1; m < n; ++m) {
    Real acc = 0;
    for (std::size_t k = 1; k < m; ++k) acc += Real(k) * h[k] * f[m - k];
    h[m] = (f[m] - acc / Real(m)) / f[0];
  }
  return h;
}

Series multiply(const Series& a, const Series& b) {
  const std::size_t n = std::min(a.size(), b.size());
  Series c(n);
  for (std::size_t m = 0; m < n; ++m) {
    Real acc = 0;
    for (std::size_t k = 0; k <= m; ++k) acc += a[k] * b[m - k];
    c[m] = acc;
  }
  return c;
}

}  // namespace subwalk::series
