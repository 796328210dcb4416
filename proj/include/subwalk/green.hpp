#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/renewal.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace subwalk {

struct GreenOptions {
  int exact_steps = 512;        // K: exact dynamic programming over the walk
  double split = 2.0;           // A: Gaussian zone ends at clamp(A |x|^2, 2K, 16K)
  double tolerance = 0.05;      // relative error bound accepted by green()
  bool use_disk_cache = true;   // exact part cached under $SUBWALK_CACHE_DIR when set
};

struct GreenValue {
  double value = 0.0;
  double error_bound = 0.0;
  double exact_part = 0.0;
  double gaussian_part = 0.0;
  double tail_part = 0.0;
  double gaussian_error = 0.0;  // fitted local-CLT bound over (K, K2]
  double tail_error = 0.0;      // local-CLT bound past K2 plus renewal model error
};

/// G_psi(x) = sum_{k >= 1} C(k) p(k, x), evaluated in three zones: exact
/// walk probabilities for k <= K, the Gaussian surrogate for K < k <= K2 and
/// an integral of the renewal asymptotics beyond K2.
class GreenEvaluator {
 public:
  GreenEvaluator(int d, BernsteinSpec spec, GreenOptions options = {});
  ~GreenEvaluator();
  GreenEvaluator(const GreenEvaluator&) = delete;
  GreenEvaluator& operator=(const GreenEvaluator&) = delete;

  /// Sum from k = 1. Throws BudgetExceeded when the error bound exceeds the tolerance.
  GreenValue green_from_one(const LatticePoint& x) const;
  /// Includes the k = 0 term: adds 1 at the origin.
  GreenValue green_full(const LatticePoint& x) const;
  /// green_full(x).value without tolerance enforcement, for kernel assembly.
  double full_value(std::span<const std::int64_t> x) const;

  int dim() const { return d_; }
  double alpha() const { return alpha_; }
  const BernsteinSpec& spec() const { return spec_; }
  const GreenOptions& options() const { return opts_; }
  const RenewalSequence& renewal() const { return renewal_; }
  /// Fitted local-CLT constants: |E(k,x)| <= c0 k^{-d/2-1} and <= c1 |x|^{-2} k^{-d/2}.
  double clt_c0() const { return c0_; }
  double clt_c1() const { return c1_; }
  /// Largest |x|_1 at which the exact zone is nonzero.
  int exact_steps() const { return opts_.exact_steps; }
  std::int64_t gaussian_end(double norm2sq) const;

 private:
  struct Zone {
    double gauss = 0.0, gauss_err = 0.0, tail = 0.0, tail_err = 0.0;
  };

  void compute_exact_part();
  bool load_cache(const std::string& path);
  void save_cache(const std::string& path) const;
  std::string cache_name() const;
  double renewal_at(std::int64_t k) const;
  Zone zone(std::int64_t r2) const;
  Zone compute_zone(std::int64_t r2) const;
  double tail_integral(double beta, double t0) const;
  double tail_clt_bound(double r2, double t0) const;
  GreenValue evaluate(std::span<const std::int64_t> x, bool full) const;

  int d_;
  BernsteinSpec spec_;
  GreenOptions opts_;
  double alpha_;
  RenewalSequence renewal_;
  std::int64_t renewal_limit_ = 0;
  double fit_amp_ = 1.0;        // non-power families: C(t) ~ amp t^{a-1} l(t)
  double model_rel_err_ = 0.0;  // relative error of the renewal tail model at the fit range
  std::unique_ptr<CanonicalDomain> domain_;
  std::vector<double> exact_;
  double c0_ = 0.0, c1_ = 0.0;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::int64_t, Zone> zones_;
};

/// C_{d,alpha} = (d/2)^{alpha/2} pi^{-d/2} Gamma((d-alpha)/2) / Gamma(alpha/2).
double asymptotic_constant(int d, double alpha);
/// A_{d,alpha} = Gamma((d-alpha)/2) / (2^alpha pi^{d/2} Gamma(alpha/2)).
double riesz_constant(int d, double alpha);

struct FourierResult {
  double value = 0.0;
  double change = 0.0;  // |last refinement - previous|
  int level = 0;
};

/// G^0(x) = pi^{-d} int_{[0,pi]^d} prod cos(theta_i x_i) / psi(1 - phi(theta)) dtheta by
/// product Gauss-Legendre on dyadic shells around 0. Refines until two levels
/// agree to `rel_tol`; throws SolverFailure otherwise.
FourierResult fourier_oracle(int d, const BernsteinSpec& spec, const LatticePoint& x, int level = 2,
                             double rel_tol = 1e-9);

struct RieszRow {
  double radius;
  double green;
  double riesz;  // A_{d,alpha} r^{alpha-d}
  double ratio;  // riesz / green
};

struct RieszReport {
  std::vector<RieszRow> rows;
  double derived_ratio = 0.0;  // (2d)^{-alpha/2}
  double stated_ratio = 0.0;   // (2/d)^{alpha/2}, the ratio asserted alongside the constants
  std::string closer;          // "derived" or "stated"
};

/// Evaluated along the first axis: x = (r, 0, ..., 0).
RieszReport ratio_to_riesz(const GreenEvaluator& ev, const std::vector<int>& radii);

}  // namespace subwalk
