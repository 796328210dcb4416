#pragma once

#include "subwalk/bernstein.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace subwalk {

enum class RenewalSource { Recurrence, SeriesInversion, ClosedForm };

const char* to_string(RenewalSource s);

/// C(0..N): potential mass of the subordinator at n.
struct RenewalSequence {
  std::vector<double> values;
  double alpha = 0.0;
  RenewalSource source = RenewalSource::Recurrence;
  std::optional<BernsteinSpec> spec;
  std::size_t exact_size = 0;       // values beyond this index come from extend_asymptotically
  double truncation_bias_bound = 0.0;  // relative rounding bias bound on exact entries

  std::size_t size() const { return values.empty() ? 0 : values.size() - 1; }
  double operator[](std::size_t n) const { return values[n]; }
  bool approximate() const { return exact_size < size(); }
};

enum class RenewalMethod { Auto, Recurrence, SeriesInversion };

/// Largest N the Auto method computes with the direct quadratic recurrence.
inline constexpr std::size_t kExactRenewalLimit = std::size_t{1} << 14;

/// C(0) = 1, C(n) = sum_{k=1}^n c[k] C(n-k).
RenewalSequence renewal_sequence(const SubordinationCoefficients& coeffs, std::size_t n,
                                 RenewalMethod method = RenewalMethod::Auto);

/// PowerAlpha only: C(n) = C(n-1) (n - 1 + alpha/2) / n.
RenewalSequence renewal_closed_form(double alpha, std::size_t n);

/// Recompute C(n) from c and C(0..n-1) with the summation order used by the
/// direct recurrence.
double renewal_term(const SubordinationCoefficients& coeffs, const RenewalSequence& seq, std::size_t n);

/// M(x) = sum_{k <= x} C(k).
std::vector<double> renewal_prefix_sums(const RenewalSequence& seq);

enum class MonotoneVerdict { Strict, NonStrict, Violated };

struct MonotoneCheck {
  bool holds = false;  // true only for Strict
  MonotoneVerdict verdict = MonotoneVerdict::Violated;
  std::optional<std::size_t> first_violation;  // first index failing strictness
};

inline constexpr double kMonotoneTolerance = 1e-14;

MonotoneCheck check_log_convexity(const RenewalSequence& seq);
MonotoneCheck check_decreasing(const RenewalSequence& seq);

struct RenewalRatio {
  std::size_t n;
  double ratio;  // C(n) Gamma(alpha/2) n^{1-alpha/2} / l(n)
};

std::vector<RenewalRatio> asymptotic_diagnostic(const RenewalSequence& seq);

/// Continue C past its exact range with a n^{alpha/2-1} l(n); a is fitted by
/// least squares on (N/10, N].
RenewalSequence extend_asymptotically(const RenewalSequence& seq, std::size_t m);

struct GeneratingResidual {
  double z;
  double residual;  // |sum_k C(k) z^k psi(1-z) - 1|
  double bound;
};

GeneratingResidual generating_residual(const RenewalSequence& seq, double z);

}  // namespace subwalk
