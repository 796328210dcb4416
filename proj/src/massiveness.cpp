#include "subwalk/massiveness.hpp"

#include "subwalk/errors.hpp"
#include "subwalk/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subwalk {

double GreenProfile::operator()(double theta) const { return std::pow(theta, d) * spec(1.0 / (theta * theta)); }

GreenProfile chi_profile(const BernsteinSpec& spec, int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  const double alpha = spec.index().value_or(2.0);
  if (!(alpha < d)) throw DomainError("chi profile needs the transient regime alpha < d");
  GreenProfile g{d, spec, 0.0, !spec.is_power()};
  for (int j = 0; j <= 80; ++j) {
    const double t = std::pow(2.0, j / 4.0);
    g.doubling = std::max(g.doubling, g(2.0 * t) / g(t));
  }
  return g;
}

const char* to_string(WienerVerdict v) {
  switch (v) {
    case WienerVerdict::DivergesLikely: return "diverges-likely";
    case WienerVerdict::ConvergesLikely: return "converges-likely";
    default: return "inconclusive";
  }
}

const char* to_string(ThornVerdict v) {
  switch (v) {
    case ThornVerdict::Massive: return "massive";
    case ThornVerdict::NonMassive: return "non-massive";
    default: return "undetermined";
  }
}

namespace {

struct Fit {
  double slope = 0.0, rms = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Fit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double b = (sy - f.slope * sx) / n;
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r += std::pow(y[i] - f.slope * x[i] - b, 2);
  f.rms = std::sqrt(r / n);
  return f;
}

bool thin_thorn(const LatticeSetSpec& s) {
  auto* t = std::get_if<LatticeSetSpec::Thorn>(&s.kind);
  return t && !is_fat(t->profile);
}

}  // namespace

WienerReport wiener_test(const GreenEvaluator& ev, const LatticeSetSpec& set, int k_min, int k_max,
                         const WienerOptions& opt) {
  if (set.d != ev.dim()) throw DomainError("set dimension differs from the evaluator's");
  if (k_min < 0 || k_max < k_min) throw DomainError("need 0 <= kmin <= kmax");
  const GreenProfile chi = chi_profile(ev.spec(), ev.dim());
  WienerReport rep;
  rep.set = set.describe();
  rep.d = ev.dim();
  rep.alpha = ev.alpha();
  if (chi.experimental) rep.notes.push_back("chi for a non-power psi is experimental");
  double partial = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    WienerRow row;
    row.k = k;
    try {
      const Shell sh = sampled_shell(set, k, opt.shell_budget);
      row.n_points = sh.full_count;
      row.n_solved = sh.points.size();
      row.stride = sh.stride;
      row.lower_bound = sh.subsampled();
      if (!sh.points.empty()) row.capacity = equilibrium(ev, sh.points, opt.capacity).capacity;
    } catch (const BudgetExceeded& e) {
      rep.partial = true;
      rep.notes.push_back(std::string("stopped at shell ") + std::to_string(k) + ": " + e.what());
      break;
    }
    row.chi = chi(std::ldexp(1.0, k));
    row.term = row.capacity / row.chi;
    partial += row.term;
    row.partial_sum = partial;
    rep.rows.push_back(row);
  }

  // the verdict looks at the last (up to five) shells with positive terms,
  // exactly solved ones when there are at least three of them
  std::size_t trailing_zero = 0;
  for (auto it = rep.rows.rbegin(); it != rep.rows.rend() && it->term <= 0.0; ++it) ++trailing_zero;
  std::vector<double> ks, lt;
  bool fit_lower = false;
  auto collect = [&](bool exact_only) {
    ks.clear();
    lt.clear();
    fit_lower = false;
    for (auto it = rep.rows.rbegin(); it != rep.rows.rend() && ks.size() < 5; ++it) {
      if (it->term <= 0.0 || (exact_only && it->lower_bound)) continue;
      ks.push_back(it->k);
      lt.push_back(std::log2(it->term));
      fit_lower = fit_lower || it->lower_bound;
    }
  };
  collect(true);
  if (ks.size() < 3) collect(false);
  if (trailing_zero >= 2 && set.is_finite()) {
    rep.verdict = WienerVerdict::ConvergesLikely;
    rep.notes.push_back("finite set: shells are empty beyond its radius");
  } else if (ks.size() < 3) {
    rep.notes.push_back("fewer than three positive terms; no decay fit");
  } else {
    const Fit f = least_squares(ks, lt);
    rep.fitted_decay_exponent = f.slope;
    rep.fit_residual = f.rms;
    if (f.slope <= -0.25) {
      if (fit_lower) {
        rep.notes.push_back("decay fitted on subsampled shells (lower bounds); cannot support convergence");
      } else {
        rep.verdict = WienerVerdict::ConvergesLikely;
      }
    } else if (f.slope >= -0.1) {
      rep.verdict = WienerVerdict::DivergesLikely;
    }
  }
  if (thin_thorn(set) && !ev.spec().is_power()) {
    rep.verdict = WienerVerdict::Inconclusive;
    rep.notes.push_back("thin thorns under a non-power psi are left open; evidence only");
  }
  return rep;
}

bool is_fat(const ThornProfile& profile) {
  if (std::holds_alternative<ThornProfile::Linear>(profile.shape)) return true;
  if (auto* t = std::get_if<ThornProfile::Table>(&profile.shape)) {
    const std::size_t N = t->values.size();
    if (N < 16) throw DomainError("thorn table needs at least 16 entries to judge t(n)/n");
    double best = 0.0, last = 0.0;
    for (std::size_t n = 8; n <= N; n *= 2) {
      last = t->values[n - 1] / static_cast<double>(n);
      best = std::max(best, last);
    }
    return last >= 0.9 * best;
  }
  return false;
}

ThornTerms thorn_series_terms(const ThornProfile& profile, int d, double alpha, int n_min, int n_max) {
  const double e = d - alpha - 1.0;
  if (!(e > 0.0)) throw DomainError("thorn series needs d - alpha - 1 > 0");
  if (n_min < 0 || n_max < n_min || n_max > 1000) throw DomainError("bad term range");
  if (is_fat(profile)) throw DomainError("t(n)/n does not vanish: use the fat-thorn rule");
  ThornTerms out;
  for (int n = n_min; n <= n_max; ++n) {
    const double N = std::ldexp(1.0, n);
    out.n.push_back(n);
    out.terms.push_back(std::pow(profile(N) / N, e));
  }
  std::ostringstream os;
  if (auto* p = std::get_if<ThornProfile::Power>(&profile.shape)) {
    out.verdict = ThornVerdict::NonMassive;
    os << "terms are geometric with ratio 2^{(gamma-1)(d-alpha-1)} = " << std::pow(2.0, (p->gamma - 1.0) * e);
  } else if (auto* l = std::get_if<ThornProfile::LinOverLog>(&profile.shape)) {
    const double s = l->beta * e;
    out.verdict = s <= 1.0 + 1e-12 ? ThornVerdict::Massive : ThornVerdict::NonMassive;
    os << "terms ~ (n ln 2)^{-" << s << "}; the series " << (s <= 1.0 + 1e-12 ? "diverges" : "converges")
       << " (threshold beta = " << 1.0 / e << ")";
  } else {
    os << "tabulated profile: no closed-form classification";
  }
  out.reason = os.str();
  return out;
}

FatThornResult fat_thorn_rule(const ThornProfile& profile, int d, double alpha, int n_max) {
  if (d < 3) throw DomainError("fat-thorn rule needs d >= 3");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("fat-thorn rule needs 0 < alpha < 2");
  if (!is_fat(profile)) throw DomainError("lim t(n)/n = 0: use the thorn series instead");
  if (n_max < 2 || n_max > 9) throw DomainError("witness range must satisfy 2 <= n_max <= 9");
  FatThornResult r;
  if (auto* l = std::get_if<ThornProfile::Linear>(&profile.shape)) {
    r.delta = l->delta;
  } else {
    const auto& v = std::get<ThornProfile::Table>(profile.shape).values;
    r.delta = v.back() / static_cast<double>(v.size());
  }
  const LatticeSetSpec thorn = LatticeSetSpec::thorn(d, profile);
  for (int n = 2; n <= n_max; ++n) {
    FatThornWitness w;
    w.n = n;
    w.radius = std::min(r.delta, 1.0) * std::ldexp(1.0, n - 2);
    w.center = LatticePoint::origin(d);
    w.center[static_cast<std::size_t>(d - 1)] = 3 * (std::int64_t{1} << (n - 1));
    const PointSet ball = lattice_ball(d, w.radius, w.center);
    w.contained = std::all_of(ball.points().begin(), ball.points().end(),
                              [&](const LatticePoint& x) { return thorn.contains(x); });
    r.witnesses.push_back(w);
  }
  r.verdict = ThornVerdict::Massive;
  return r;
}

ThornClassification classify_thorn(const ThornProfile& profile, int d, double alpha) {
  ThornClassification c;
  if (is_fat(profile)) {
    c.route = "fat-thorn";
    c.fat = fat_thorn_rule(profile, d, alpha);
    c.verdict = c.fat->verdict;
    std::ostringstream os;
    os << "limsup t(n)/n = " << c.fat->delta << " > 0: inscribed balls of radius ~ 2^n give massiveness";
    c.reason = os.str();
    return c;
  }
  c.route = "series";
  c.terms = thorn_series_terms(profile, d, alpha, 1, 60);
  c.verdict = c.terms->verdict;
  c.reason = c.terms->reason;
  return c;
}

ThornConsistency thorn_consistency(const GreenEvaluator& ev, const ThornProfile& profile, int n_min, int n_max,
                                   const WienerOptions& opt) {
  const LatticeSetSpec set = LatticeSetSpec::thorn(ev.dim(), profile);
  const WienerReport rep = wiener_test(ev, set, n_min, n_max, opt);
  if (rep.partial) throw BudgetExceeded("thorn shells exceeded the budget: " + rep.notes.back());
  const ThornTerms an = thorn_series_terms(profile, ev.dim(), ev.alpha(), n_min, n_max);
  ThornConsistency out;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    ThornConsistencyRow r;
    r.n = rep.rows[i].k;
    r.shell_term = rep.rows[i].term;
    r.analytic_term = an.terms[i];
    r.ratio = r.shell_term / r.analytic_term;
    r.lower_bound = rep.rows[i].lower_bound;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    out.rows.push_back(r);
  }
  out.band = hi / lo;
  return out;
}

namespace {

double hyperplane_integral(int d, double alpha, double eps) {
  using boost::math::quadrature::gauss_kronrod;
  const double scale = std::pow(static_cast<double>(d), alpha / 2.0) / kPi;
  // xi = e^u; the integrand in u is smooth on each decade
  auto f = [&](double u) {
    const double xi = std::exp(u);
    const double s = std::sin(xi / 2.0);
    return xi * std::pow(2.0 * s * s, -alpha / 2.0);
  };
  CompensatedSum acc;
  double a = std::log(eps);
  const double top = std::log(kPi);
  while (a < top) {
    const double b = std::min(top, a + std::log(10.0));
    acc.add(gauss_kronrod<double, 61>::integrate(f, a, b, 5, 1e-14));
    a = b;
  }
  return scale * acc.value();
}

}  // namespace

HyperplaneReport hyperplane_return_sum(int d, double alpha, const std::vector<double>& epsilons) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("hyperplane sum needs 0 < alpha <= 2");
  if (epsilons.empty()) throw DomainError("no epsilons given");
  HyperplaneReport rep;
  rep.d = d;
  rep.alpha = alpha;
  for (double e : epsilons) {
    if (!(e > 0.0 && e < kPi)) throw DomainError("epsilon must lie in (0, pi)");
    const double v = hyperplane_integral(d, alpha, e);
    if (!std::isfinite(v)) throw SolverFailure("hyperplane quadrature returned a non-finite value");
    rep.rows.push_back({e, v});
  }
  std::vector<HyperplaneRow> sorted = rep.rows;
  std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.epsilon > y.epsilon; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double decades = std::log10(sorted[i - 1].epsilon / sorted[i].epsilon);
    if (decades <= 0.0) continue;
    rep.decade_growth.push_back((sorted[i].integral - sorted[i - 1].integral) / decades);
  }
  const auto& g = rep.decade_growth;
  rep.bounded = g.size() >= 2 && g[g.size() - 1] < 0.9 * g[g.size() - 2];
  rep.verdict = rep.bounded ? "non-massive" : "massive";
  return rep;
}

double hyperplane_log_rate(int d) { return std::sqrt(2.0 * d) / kPi * std::log(10.0); }

}  // namespace subwalk
