#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace subwalk {

/// psi(lambda) = lambda^{alpha/2}. alpha = 2 is the identity (no subordination).
struct PowerAlpha {
  double alpha;
};

/// psi(lambda) ~ lambda^{alpha/2} (log(e + 1/lambda))^{-gamma}, normalized so
/// psi(1) = 1. Experimental: membership in BF is only checked numerically by
/// the coefficient negativity gate.
struct LogPower {
  double alpha;
  double gamma;
};

/// psi(lambda) = b lambda + int_0^inf (1 - e^{-lambda s}) nu(s) ds, normalized.
/// `alpha` is an optional declared regular-variation index; without it the
/// asymptotic machinery (renewal diagnostics, Green tail) is unavailable.
struct TabulatedLevy {
  std::function<double(double)> density;
  double drift = 0.0;
  std::optional<double> alpha;
};

using BernsteinFamily = std::variant<PowerAlpha, LogPower, TabulatedLevy>;

class BernsteinSpec {
 public:
  static BernsteinSpec power(double alpha);
  static BernsteinSpec log_power(double alpha, double gamma);
  static BernsteinSpec tabulated(std::function<double(double)> density, double drift = 0.0,
                                 std::optional<double> alpha = std::nullopt);

  const BernsteinFamily& family() const { return family_; }
  double normalizer() const { return normalizer_; }

  /// psi(lambda) after normalization. Throws DomainError for lambda < 0.
  double operator()(double lambda) const;

  /// Regular-variation index alpha, if the family defines one.
  std::optional<double> index() const;
  /// Same as index() but throws DomainError when unavailable.
  double alpha() const;

  /// Slowly varying factor l(x) in psi(lambda) = lambda^{alpha/2} / l(1/lambda).
  bool has_slowly_varying() const;
  double slowly_varying(double x) const;

  bool is_power() const { return std::holds_alternative<PowerAlpha>(family_); }
  bool is_identity() const;
  std::string describe() const;

 private:
  explicit BernsteinSpec(BernsteinFamily family);
  double raw(double lambda) const;

  BernsteinFamily family_;
  double normalizer_ = 1.0;
};

double eval_psi(const BernsteinSpec& spec, double lambda);

/// c(psi, n) for n = 1..N. values[0] is unused and zero.
struct SubordinationCoefficients {
  BernsteinSpec spec;
  std::vector<double> values;
  double alpha = 0.0;          // NaN when the family has no index
  double tail_exponent = 0.0;  // 1 + alpha/2

  std::size_t size() const { return values.empty() ? 0 : values.size() - 1; }
  double operator[](std::size_t n) const { return n < values.size() ? values[n] : 0.0; }
  /// Sum of c[1..N], compensated.
  double mass() const;
};

SubordinationCoefficients coefficients(const BernsteinSpec& spec, std::size_t n);

/// Taylor coefficients of 1 - psi(1 - s) by 256-bit series arithmetic. Works for
/// PowerAlpha and LogPower; this is the route `coefficients` takes for LogPower.
SubordinationCoefficients coefficients_by_series(const BernsteinSpec& spec, std::size_t n);

/// Largest N accepted by the multiprecision series route.
inline constexpr std::size_t kSeriesMaxTerms = 4096;

struct TailRatio {
  std::size_t n;
  double tail;   // sum_{k >= n} c[k]
  double ratio;  // tail * l(n) Gamma(1 - alpha/2) n^{alpha/2}
};

/// Tail law check at dyadic n <= N. Requires at least 10 dyadic checkpoints.
std::vector<TailRatio> coefficient_tail_check(const SubordinationCoefficients& coeffs);

struct TauDistribution {
  std::size_t first = 0;       // smallest k in the support, = n
  std::vector<double> probs;   // P(tau_n = first + i)
  double deficit = 0.0;        // 1 - sum(probs): mass beyond kmax
};

/// Law of tau_n = R_1 + ... + R_n truncated at kmax.
TauDistribution tau_pmf(const SubordinationCoefficients& coeffs, std::size_t n, std::size_t kmax);

}  // namespace subwalk
