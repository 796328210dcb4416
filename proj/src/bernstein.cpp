#include "subwalk/bernstein.hpp"

#include "subwalk/errors.hpp"
#include "subwalk/numeric.hpp"
#include "subwalk/series.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace subwalk {

namespace {

constexpr double kNegativityTolerance = 1e-14;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// int_0^inf f(t) dt for an integrand concentrated around `peak` with spread
// `width`, integrable singularity allowed at 0.
template <class F>
double integrate_half_line(F f, double peak, double width) {
  using namespace boost::math::quadrature;
  const double lo = std::max(0.0, peak - 12.0 * width);
  const double hi = std::max(1.0, peak + 12.0 * width);
  tanh_sinh<double> ts;
  exp_sinh<double> es;
  double total = 0.0;
  if (lo > 0.0) total += ts.integrate(f, 0.0, lo);
  const double mid_lo = lo > 0.0 ? lo : 0.0;
  if (mid_lo == 0.0)
    total += ts.integrate(f, 0.0, hi);
  else
    total += gauss_kronrod<double, 61>::integrate(f, mid_lo, hi, 15, 1e-14);
  total += es.integrate(f, hi, std::numeric_limits<double>::infinity());
  return total;
}

void check_alpha(double alpha, bool allow_two) {
  const bool ok = allow_two ? (alpha > 0.0 && alpha <= 2.0) : (alpha > 0.0 && alpha < 2.0);
  if (!ok || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "alpha must lie in (0," << (allow_two ? "2]" : "2)") << ", got " << alpha;
    throw DomainError(os.str());
  }
}

void gate_negative(const std::vector<double>& c, const std::string& what) {
  for (std::size_t n = 1; n < c.size(); ++n) {
    if (c[n] < -kNegativityTolerance) {
      std::ostringstream os;
      os << "not a valid Bernstein subordination: c(" << n << ") = " << c[n] << " < 0 for " << what;
      throw NotBernsteinError(os.str());
    }
  }
}

std::vector<double> power_closed_form(double alpha, std::size_t n) {
  std::vector<double> c(n + 1, 0.0);
  if (n == 0) return c;
  const double a = alpha / 2.0;
  c[1] = a;
  for (std::size_t k = 1; k < n; ++k) c[k + 1] = c[k] * (static_cast<double>(k) - a) / static_cast<double>(k + 1);
  return c;
}

std::vector<double> tabulated_moments(const TabulatedLevy& fam, double normalizer, std::size_t n) {
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double lg = std::lgamma(kk + 1.0);
    auto f = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double w = std::exp(kk * std::log(t) - t - lg);
      if (w == 0.0) return 0.0;
      // integrable singularities at 0 overflow only at subnormal t
      const double v = w * fam.density(t);
      return std::isfinite(v) ? v : 0.0;
    };
    double v = integrate_half_line(f, kk, std::sqrt(kk + 1.0));
    if (k == 1) v += fam.drift;
    c[k] = normalizer * v;
  }
  return c;
}

}  // namespace

BernsteinSpec::BernsteinSpec(BernsteinFamily family) : family_(std::move(family)) {
  const double r1 = raw(1.0);
  if (!(r1 > 0.0) || !std::isfinite(r1)) throw DomainError("psi(1) must be positive and finite");
  normalizer_ = 1.0 / r1;
}

BernsteinSpec BernsteinSpec::power(double alpha) {
  check_alpha(alpha, true);
  return BernsteinSpec(PowerAlpha{alpha});
}

BernsteinSpec BernsteinSpec::log_power(double alpha, double gamma) {
  check_alpha(alpha, false);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("LogPower gamma must be >= 0");
  return BernsteinSpec(LogPower{alpha, gamma});
}

BernsteinSpec BernsteinSpec::tabulated(std::function<double(double)> density, double drift,
                                       std::optional<double> alpha) {
  if (!density) throw DomainError("TabulatedLevy needs a density");
  if (!(drift >= 0.0)) throw DomainError("TabulatedLevy drift must be >= 0");
  if (alpha) check_alpha(*alpha, true);
  return BernsteinSpec(TabulatedLevy{std::move(density), drift, alpha});
}

double BernsteinSpec::raw(double lambda) const {
  if (lambda == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const PowerAlpha& p) { return std::pow(lambda, p.alpha / 2.0); },
          [&](const LogPower& p) {
            return std::pow(lambda, p.alpha / 2.0) * std::pow(std::log(std::exp(1.0) + 1.0 / lambda), -p.gamma);
          },
          [&](const TabulatedLevy& p) {
            auto f = [&](double s) {
              if (s <= 0.0) return 0.0;
              const double v = -std::expm1(-lambda * s) * p.density(s);
              return std::isfinite(v) ? v : 0.0;
            };
            using namespace boost::math::quadrature;
            tanh_sinh<double> ts;
            exp_sinh<double> es;
            return p.drift * lambda + ts.integrate(f, 0.0, 1.0) +
                   es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
          },
      },
      family_);
}

double BernsteinSpec::operator()(double lambda) const {
  if (lambda < 0.0 || std::isnan(lambda)) throw DomainError("psi is defined for lambda >= 0 only");
  if (lambda == 0.0) return 0.0;
  if (lambda == 1.0) return 1.0;
  if (is_power()) return raw(lambda);
  return normalizer_ * raw(lambda);
}

double eval_psi(const BernsteinSpec& spec, double lambda) { return spec(lambda); }

std::optional<double> BernsteinSpec::index() const {
  return std::visit(Overloaded{
                        [](const PowerAlpha& p) -> std::optional<double> { return p.alpha; },
                        [](const LogPower& p) -> std::optional<double> { return p.alpha; },
                        [](const TabulatedLevy& p) -> std::optional<double> { return p.alpha; },
                    },
                    family_);
}

double BernsteinSpec::alpha() const {
  auto a = index();
  if (!a) throw DomainError("this Bernstein family declares no index alpha");
  return *a;
}

bool BernsteinSpec::has_slowly_varying() const { return !std::holds_alternative<TabulatedLevy>(family_); }

double BernsteinSpec::slowly_varying(double x) const {
  if (const auto* lp = std::get_if<LogPower>(&family_))
    return std::pow(std::log(std::exp(1.0) + x), lp->gamma) / normalizer_;
  if (is_power()) return 1.0;
  throw DomainError("no slowly varying factor is identified for a tabulated Levy density");
}

bool BernsteinSpec::is_identity() const {
  const auto* p = std::get_if<PowerAlpha>(&family_);
  return p && p->alpha == 2.0;
}

std::string BernsteinSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const PowerAlpha& p) { os << "power(alpha=" << p.alpha << ")"; },
                 [&](const LogPower& p) { os << "logpower(alpha=" << p.alpha << ",gamma=" << p.gamma << ")"; },
                 [&](const TabulatedLevy& p) {
                   os << "tabulated(drift=" << p.drift;
                   if (p.alpha) os << ",alpha=" << *p.alpha;
                   os << ")";
                 },
             },
             family_);
  return os.str();
}

double SubordinationCoefficients::mass() const {
  CompensatedSum s;
  for (std::size_t n = 1; n < values.size(); ++n) s.add(values[n]);
  return s.value();
}

namespace {

SubordinationCoefficients make_coeffs(const BernsteinSpec& spec, std::vector<double> values) {
  SubordinationCoefficients out{spec, std::move(values), std::numeric_limits<double>::quiet_NaN(),
                                std::numeric_limits<double>::quiet_NaN()};
  if (auto a = spec.index()) {
    out.alpha = *a;
    out.tail_exponent = 1.0 + *a / 2.0;
  }
  return out;
}

}  // namespace

SubordinationCoefficients coefficients_by_series(const BernsteinSpec& spec, std::size_t n) {
  if (n < 1) throw DomainError("need at least one coefficient");
  if (n > kSeriesMaxTerms) {
    std::ostringstream os;
    os << "series route limited to N <= " << kSeriesMaxTerms << " (requested " << n << ")";
    throw BudgetExceeded(os.str());
  }
  using series::Real;
  using series::Series;
  const std::size_t len = n + 1;

  Series one_minus_s(len, Real(0));
  one_minus_s[0] = 1;
  one_minus_s[1] = -1;

  Series psi_of;  // psi(1 - s) before normalization
  if (const auto* p = std::get_if<PowerAlpha>(&spec.family())) {
    psi_of = series::power(one_minus_s, Real(p->alpha) / 2);
  } else if (const auto* lp = std::get_if<LogPower>(&spec.family())) {
    // log(e + 1/(1-s)) with 1/(1-s) = sum s^k
    Series inner(len, Real(1));
    inner[0] = boost::multiprecision::exp(Real(1)) + 1;
    Series logs = series::log(inner);
    Series damp = series::power(logs, -Real(lp->gamma));
    psi_of = series::multiply(series::power(one_minus_s, Real(lp->alpha) / 2), damp);
  } else {
    throw DomainError("series expansion needs a closed-form psi (PowerAlpha or LogPower)");
  }

  const Real norm = spec.is_power() ? Real(1) : Real(spec.normalizer());
  std::vector<double> c(len, 0.0);
  for (std::size_t k = 1; k < len; ++k) c[k] = static_cast<double>(-norm * psi_of[k]);
  gate_negative(c, spec.describe());
  return make_coeffs(spec, std::move(c));
}

SubordinationCoefficients coefficients(const BernsteinSpec& spec, std::size_t n) {
  if (n < 1) throw DomainError("need at least one coefficient");
  if (const auto* p = std::get_if<PowerAlpha>(&spec.family())) return make_coeffs(spec, power_closed_form(p->alpha, n));
  if (std::holds_alternative<LogPower>(spec.family())) return coefficients_by_series(spec, n);
  const auto& tab = std::get<TabulatedLevy>(spec.family());
  auto c = tabulated_moments(tab, spec.normalizer(), n);
  gate_negative(c, spec.describe());
  return make_coeffs(spec, std::move(c));
}

std::vector<TailRatio> coefficient_tail_check(const SubordinationCoefficients& coeffs) {
  const std::size_t n_max = coeffs.size();
  if (n_max < 512) throw DomainError("tail check needs N >= 512 (ten dyadic checkpoints)");
  const auto& spec = coeffs.spec;
  const double alpha = spec.alpha();
  const double l_unavailable = !spec.has_slowly_varying();
  if (l_unavailable) throw DomainError("tail diagnostics need an identified slowly varying factor");

  std::vector<TailRatio> out;
  CompensatedSum partial;  // sum_{k < n}
  std::size_t next = 1;
  for (std::size_t k = 1; k <= n_max; ++k) {
    if (k == next) {
      const double tail = std::max(0.0, 1.0 - partial.value());
      double ratio = 0.0;
      if (alpha < 2.0)
        ratio = tail * spec.slowly_varying(static_cast<double>(k)) * std::tgamma(1.0 - alpha / 2.0) *
                std::pow(static_cast<double>(k), alpha / 2.0);
      out.push_back({k, tail, ratio});
      next *= 2;
    }
    partial.add(coeffs[k]);
  }
  return out;
}

namespace {

std::vector<double> truncated_convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

TauDistribution tau_pmf(const SubordinationCoefficients& coeffs, std::size_t n, std::size_t kmax) {
  if (n < 1) throw DomainError("tau_n needs n >= 1");
  if (kmax < n) throw DomainError("empty distribution: kmax < n");
  std::vector<double> base(kmax + 1, 0.0);
  for (std::size_t k = 1; k <= std::min(kmax, coeffs.size()); ++k) base[k] = coeffs[k];

  std::vector<double> result(kmax + 1, 0.0);
  result[0] = 1.0;
  for (std::size_t e = n; e > 0; e >>= 1) {
    if (e & 1U) result = truncated_convolve(result, base);
    if (e > 1) base = truncated_convolve(base, base);
  }

  TauDistribution out;
  out.first = n;
  out.probs.assign(result.begin() + static_cast<std::ptrdiff_t>(n), result.end());
  out.deficit = std::max(0.0, 1.0 - compensated_sum(out.probs));
  return out;
}

}  // namespace subwalk
