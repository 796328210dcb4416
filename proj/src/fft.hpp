#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace subwalk::detail {

/// Linear convolution of real sequences, first out_len entries.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t out_len);

/// Smallest 2^a 3^b 5^c >= n.
std::size_t fft_good_size(std::size_t n);

/// Real 3-D cyclic convolution by a fixed kernel. The kernel spectrum is
/// computed once; apply() may be called repeatedly.
class Convolver3 {
 public:
  Convolver3(std::array<std::size_t, 3> dims, const std::vector<double>& kernel);
  ~Convolver3();
  Convolver3(const Convolver3&) = delete;
  Convolver3& operator=(const Convolver3&) = delete;

  const std::array<std::size_t, 3>& dims() const { return dims_; }
  /// in/out are dense row-major arrays of size n0*n1*n2.
  void apply(const std::vector<double>& in, std::vector<double>& out);

 private:
  std::array<std::size_t, 3> dims_;
  std::size_t nreal_ = 0, ncomplex_ = 0;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* kspec_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace subwalk::detail
