#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace subwalk::detail {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::size_t fft_good_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  if (a.empty() || b.empty() || out_len == 0) return out;
  const std::size_t na = std::min(a.size(), out_len), nb = std::min(b.size(), out_len);
  if (na * nb <= 4096) {
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb && i + j < out_len; ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  const std::size_t n = fft_good_size(na + nb - 1);
  const std::size_t nc = n / 2 + 1;
  double* ra = fftw_alloc_real(n);
  double* rb = fftw_alloc_real(n);
  fftw_complex* ca = fftw_alloc_complex(nc);
  fftw_complex* cb = fftw_alloc_complex(nc);
  fftw_plan pa, pb, pinv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
  }
  std::fill(ra, ra + n, 0.0);
  std::fill(rb, rb + n, 0.0);
  std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(na), ra);
  std::copy(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(nb), rb);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
    const double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
    ca[i][0] = re;
    ca[i][1] = im;
  }
  fftw_execute(pinv);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len && i < n; ++i) out[i] = ra[i] * scale;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pinv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

Convolver3::Convolver3(std::array<std::size_t, 3> dims, const std::vector<double>& kernel) : dims_(dims) {
  nreal_ = dims[0] * dims[1] * dims[2];
  ncomplex_ = dims[0] * dims[1] * (dims[2] / 2 + 1);
  if (kernel.size() != nreal_) throw std::invalid_argument("Convolver3: kernel size mismatch");
  real_ = fftw_alloc_real(nreal_);
  auto* spec = fftw_alloc_complex(ncomplex_);
  auto* kspec = fftw_alloc_complex(ncomplex_);
  spec_ = spec;
  kspec_ = kspec;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n0 = static_cast<int>(dims[0]), n1 = static_cast<int>(dims[1]), n2 = static_cast<int>(dims[2]);
    fwd_ = fftw_plan_dft_r2c_3d(n0, n1, n2, real_, spec, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_3d(n0, n1, n2, spec, real_, FFTW_ESTIMATE);
  }
  std::copy(kernel.begin(), kernel.end(), real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  const double scale = 1.0 / static_cast<double>(nreal_);
  for (std::size_t i = 0; i < ncomplex_; ++i) {
    kspec[i][0] = spec[i][0] * scale;
    kspec[i][1] = spec[i][1] * scale;
  }
}

Convolver3::~Convolver3() {
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
  fftw_free(real_);
  fftw_free(spec_);
  fftw_free(kspec_);
}

void Convolver3::apply(const std::vector<double>& in, std::vector<double>& out) {
  if (in.size() != nreal_) throw std::invalid_argument("Convolver3: input size mismatch");
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  auto* spec = static_cast<fftw_complex*>(spec_);
  auto* kspec = static_cast<fftw_complex*>(kspec_);
  for (std::size_t i = 0; i < ncomplex_; ++i) {
    const double re = spec[i][0] * kspec[i][0] - spec[i][1] * kspec[i][1];
    const double im = spec[i][0] * kspec[i][1] + spec[i][1] * kspec[i][0];
    spec[i][0] = re;
    spec[i][1] = im;
  }
  fftw_execute(static_cast<fftw_plan>(bwd_));
  out.assign(real_, real_ + nreal_);
}

}  // namespace subwalk::detail
