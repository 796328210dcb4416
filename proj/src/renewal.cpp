#include "subwalk/renewal.hpp"

#include "fft.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/numeric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace subwalk {

const char* to_string(RenewalSource s) {
  switch (s) {
    case RenewalSource::Recurrence: return "recurrence";
    case RenewalSource::SeriesInversion: return "series_inversion";
    case RenewalSource::ClosedForm: return "closed_form";
  }
  return "?";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double direct_term(const std::vector<double>& c, const std::vector<double>& C, std::size_t n) {
  CompensatedSum s;
  for (std::size_t k = 1; k <= n; ++k) s.add(c[k] * C[n - k]);
  return s.value();
}

// Online convolution by divide and conquer: acc[n] holds the contributions
// of C[j], j < l, when solve(l, r) is entered.
class Inverter {
 public:
  Inverter(const std::vector<double>& c, std::size_t n) : c_(c), C_(n + 1, 0.0), acc_(n + 1, 0.0) {}

  std::vector<double> run() {
    solve(0, C_.size());
    return std::move(C_);
  }

 private:
  static constexpr std::size_t kLeaf = 64;

  void solve(std::size_t l, std::size_t r) {
    if (r - l <= kLeaf) {
      for (std::size_t n = l; n < r; ++n) {
        if (n == 0) {
          C_[0] = 1.0;
          continue;
        }
        CompensatedSum s;
        s.add(acc_[n]);
        for (std::size_t j = l; j < n; ++j) s.add(c_[n - j] * C_[j]);
        C_[n] = s.value();
      }
      return;
    }
    const std::size_t m = l + (r - l) / 2;
    solve(l, m);
    std::vector<double> left(C_.begin() + static_cast<std::ptrdiff_t>(l), C_.begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<double> kern(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(std::min(c_.size(), r - l)));
    auto conv = detail::fft_convolve(left, kern, r - l);
    for (std::size_t n = m; n < r; ++n) acc_[n] += conv[n - l];
    solve(m, r);
  }

  const std::vector<double>& c_;
  std::vector<double> C_;
  std::vector<double> acc_;
};

}  // namespace

RenewalSequence renewal_sequence(const SubordinationCoefficients& coeffs, std::size_t n, RenewalMethod method) {
  if (n > coeffs.size()) {
    std::ostringstream os;
    os << "renewal sequence to N=" << n << " needs coefficients to N, have " << coeffs.size();
    throw DomainError(os.str());
  }
  if (method == RenewalMethod::Auto)
    method = n <= kExactRenewalLimit ? RenewalMethod::Recurrence : RenewalMethod::SeriesInversion;

  RenewalSequence seq;
  seq.alpha = coeffs.alpha;
  seq.spec = coeffs.spec;
  seq.exact_size = n;
  std::vector<double> c(coeffs.values.begin(), coeffs.values.begin() + static_cast<std::ptrdiff_t>(n + 1));

  if (method == RenewalMethod::Recurrence) {
    seq.source = RenewalSource::Recurrence;
    seq.values.assign(n + 1, 0.0);
    seq.values[0] = 1.0;
    for (std::size_t m = 1; m <= n; ++m) seq.values[m] = direct_term(c, seq.values, m);
    seq.truncation_bias_bound = static_cast<double>(n + 1) * 4.0 * kEps;
  } else {
    seq.source = RenewalSource::SeriesInversion;
    seq.values = Inverter(c, n).run();
    // FFT rounding is relative to the block sums, all terms nonnegative
    seq.truncation_bias_bound = static_cast<double>(n + 1) * 4.0 * kEps * std::log2(static_cast<double>(n + 2));
  }
  return seq;
}

RenewalSequence renewal_closed_form(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0,2]");
  RenewalSequence seq;
  seq.alpha = alpha;
  seq.spec = BernsteinSpec::power(alpha);
  seq.source = RenewalSource::ClosedForm;
  seq.exact_size = n;
  seq.values.assign(n + 1, 1.0);
  const double a = alpha / 2.0;
  for (std::size_t m = 1; m <= n; ++m)
    seq.values[m] = seq.values[m - 1] * (static_cast<double>(m) - 1.0 + a) / static_cast<double>(m);
  seq.truncation_bias_bound = static_cast<double>(n + 1) * kEps;
  return seq;
}

double renewal_term(const SubordinationCoefficients& coeffs, const RenewalSequence& seq, std::size_t n) {
  if (n == 0) return 1.0;
  if (n > coeffs.size() || n > seq.size()) throw DomainError("renewal_term: index beyond computed range");
  return direct_term(coeffs.values, seq.values, n);
}

std::vector<double> renewal_prefix_sums(const RenewalSequence& seq) {
  std::vector<double> m(seq.values.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < seq.values.size(); ++i) {
    s.add(seq.values[i]);
    m[i] = s.value();
  }
  return m;
}

namespace {

MonotoneCheck summarize(bool any_violation, bool any_equal, std::optional<std::size_t> first) {
  MonotoneCheck out;
  out.first_violation = first;
  if (any_violation)
    out.verdict = MonotoneVerdict::Violated;
  else if (any_equal)
    out.verdict = MonotoneVerdict::NonStrict;
  else
    out.verdict = MonotoneVerdict::Strict;
  out.holds = out.verdict == MonotoneVerdict::Strict;
  return out;
}

}  // namespace

MonotoneCheck check_log_convexity(const RenewalSequence& seq) {
  const std::size_t n_max = std::min(seq.size(), seq.exact_size);
  if (n_max < 3) throw DomainError("log-convexity check needs N >= 3");
  bool violated = false, equal = false;
  std::optional<std::size_t> first;
  const auto& C = seq.values;
  for (std::size_t n = 2; n < n_max; ++n) {
    const double sq = C[n] * C[n];
    // C(n-1)C(n+1) - C(n)^2 with one rounding on the product
    const double diff = std::fma(C[n - 1], C[n + 1], -sq);
    const double tol = kMonotoneTolerance * sq;
    if (diff > tol) continue;
    if (!first) first = n;
    if (diff < -tol)
      violated = true;
    else
      equal = true;
  }
  return summarize(violated, equal, first);
}

MonotoneCheck check_decreasing(const RenewalSequence& seq) {
  const std::size_t n_max = std::min(seq.size(), seq.exact_size);
  if (n_max < 1) throw DomainError("decreasing check needs N >= 1");
  bool violated = false, equal = false;
  std::optional<std::size_t> first;
  const auto& C = seq.values;
  for (std::size_t n = 0; n < n_max; ++n) {
    const double diff = C[n] - C[n + 1];
    const double tol = kMonotoneTolerance * C[n];
    if (diff > tol) continue;
    if (!first) first = n + 1;
    if (diff < -tol)
      violated = true;
    else
      equal = true;
  }
  return summarize(violated, equal, first);
}

namespace {

double renewal_shape(const RenewalSequence& seq, double n) {
  const double a = seq.alpha / 2.0;
  double l = 1.0;
  if (seq.spec && !seq.spec->is_power()) l = seq.spec->slowly_varying(n);
  return std::pow(n, a - 1.0) * l;
}

void require_index(const RenewalSequence& seq) {
  if (!std::isfinite(seq.alpha)) throw DomainError("renewal asymptotics need a family with an index alpha");
  if (seq.spec && !seq.spec->has_slowly_varying())
    throw DomainError("renewal asymptotics need an identified slowly varying factor");
}

}  // namespace

std::vector<RenewalRatio> asymptotic_diagnostic(const RenewalSequence& seq) {
  require_index(seq);
  const std::size_t n_max = std::min(seq.size(), seq.exact_size);
  if (n_max < (std::size_t{1} << 10)) throw DomainError("asymptotic diagnostic needs N >= 2^10");
  const double g = std::tgamma(seq.alpha / 2.0);
  std::vector<RenewalRatio> out;
  for (std::size_t n = 1; n <= n_max; n *= 2)
    out.push_back({n, seq.values[n] * g / renewal_shape(seq, static_cast<double>(n))});
  return out;
}

RenewalSequence extend_asymptotically(const RenewalSequence& seq, std::size_t m) {
  require_index(seq);
  const std::size_t n = std::min(seq.size(), seq.exact_size);
  if (n < (std::size_t{1} << 10)) throw DomainError("asymptotic continuation needs an exact range N >= 2^10");
  if (m <= n) throw DomainError("extend_asymptotically needs M > N");

  CompensatedSum num, den;
  for (std::size_t k = n / 10 + 1; k <= n; ++k) {
    const double f = renewal_shape(seq, static_cast<double>(k));
    num.add(seq.values[k] * f);
    den.add(f * f);
  }
  const double amp = num.value() / den.value();

  RenewalSequence out = seq;
  out.values.resize(n + 1);
  out.values.reserve(m + 1);
  for (std::size_t k = n + 1; k <= m; ++k) out.values.push_back(amp * renewal_shape(seq, static_cast<double>(k)));
  out.exact_size = n;
  return out;
}

GeneratingResidual generating_residual(const RenewalSequence& seq, double z) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("generating residual needs 0 < z < 1");
  if (!seq.spec) throw DomainError("generating residual needs the Bernstein spec");
  const std::size_t n = std::min(seq.size(), seq.exact_size);
  CompensatedSum s;
  double zk = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    s.add(seq.values[k] * zk);
    zk *= z;
  }
  const double psi = (*seq.spec)(1.0 - z);
  GeneratingResidual r;
  r.z = z;
  r.residual = std::abs(s.value() * psi - 1.0);
  r.bound = std::pow(z, static_cast<double>(n + 1)) * psi / (1.0 - z) + 1e-13;
  return r;
}

}  // namespace subwalk
