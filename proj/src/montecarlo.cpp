#include "subwalk/montecarlo.hpp"

#include "subwalk/capacity.hpp"
#include "subwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace subwalk {

std::string describe(const Stopping& s) {
  std::ostringstream os;
  if (auto* h = std::get_if<Horizon>(&s))
    os << "horizon:" << h->base_steps;
  else {
    const auto& e = std::get<EscapeRadius>(s);
    os << "escape:" << e.radius << ":" << e.max_base_steps;
  }
  return os.str();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(~trial)));
}

IncrementSampler::IncrementSampler(const SubordinationCoefficients& coeffs) {
  if (coeffs.size() == 0) throw DomainError("increment law needs at least one coefficient");
  cdf_.reserve(coeffs.size());
  double acc = 0.0;
  for (std::size_t k = 1; k <= coeffs.size(); ++k) {
    acc += coeffs[k];
    cdf_.push_back(acc);
  }
  tail_ = std::max(0.0, 1.0 - acc);
  if (tail_ < 1e-15) tail_ = 0.0;
  a_ = std::isfinite(coeffs.alpha) ? coeffs.alpha / 2.0 : coeffs.tail_exponent - 1.0;
  if (tail_ > 0.0 && !(a_ > 0.0)) throw DomainError("increment law has tail mass but no tail index");
}

std::uint64_t IncrementSampler::operator()(std::mt19937_64& rng) const {
  const double u = unit(rng);
  if (tail_ == 0.0 || u < cdf_.back()) {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1)) + 1;
  }
  // continuous Pareto on (N + 1/2, inf), rounded to the nearest integer
  const double v = 1.0 - unit(rng);
  const double N = static_cast<double>(cdf_.size());
  const double t = (N + 0.5) * std::pow(v, -1.0 / a_);
  if (!(t < 9.0e18)) return std::uint64_t{9000000000000000000ULL};
  return std::max<std::uint64_t>(cdf_.size() + 1, static_cast<std::uint64_t>(std::llround(t)));
}

bool simulate_step(LatticePoint& pos, std::uint64_t R, std::mt19937_64& rng) {
  const auto d = pos.coords.size();
  if (R <= 32) {
    for (std::uint64_t s = 0; s < R; ++s) {
      const auto j = rng() % (2 * d);
      pos[j / 2] += (j & 1) ? 1 : -1;
    }
    return false;
  }
  if (R <= kSurrogateCap) {
    auto left = static_cast<std::int64_t>(R);
    for (std::size_t i = 0; i < d; ++i) {
      std::int64_t m = left;
      if (i + 1 < d) {
        std::binomial_distribution<std::int64_t> split(left, 1.0 / static_cast<double>(d - i));
        m = split(rng);
      }
      left -= m;
      if (m == 0) continue;
      std::binomial_distribution<std::int64_t> up(m, 0.5);
      pos[i] += 2 * up(rng) - m;
    }
    return false;
  }
  // Gaussian surrogate: N(0, R/d) per coordinate, then fix the parity
  std::normal_distribution<double> g(0.0, std::sqrt(static_cast<double>(R) / static_cast<double>(d)));
  std::int64_t moved = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto v = static_cast<std::int64_t>(std::llround(g(rng)));
    pos[i] += v;
    moved += v;
  }
  if (((moved - static_cast<std::int64_t>(R & 1)) & 1) != 0) pos[0] += (rng() & 1) ? 1 : -1;
  return true;
}

TrialOutcomes run_trials(const SimConfig& config, const LatticeSetSpec& set) {
  if (config.trials == 0) throw DomainError("zero trials");
  if (config.start.dim() != config.d || set.d != config.d) throw DomainError("dimension mismatch in simulation");
  const IncrementSampler sampler(coefficients(config.spec, config.coefficient_terms));
  TrialOutcomes out;
  out.hit_time.assign(config.trials, TrialOutcomes::kNever);
  const bool in_set = set.contains(config.start);
  const auto* hz = std::get_if<Horizon>(&config.stopping);
  const auto* es = std::get_if<EscapeRadius>(&config.stopping);
  const std::uint64_t budget = hz ? hz->base_steps : es->max_base_steps;
  const double esc2 = es ? es->radius * es->radius : 0.0;
  std::uint64_t surrogate = 0, exhausted = 0;
  const auto n = static_cast<std::int64_t>(config.trials);

#pragma omp parallel for schedule(dynamic, 64) reduction(+ : surrogate, exhausted)
  for (std::int64_t i = 0; i < n; ++i) {
    if (in_set) {
      out.hit_time[static_cast<std::size_t>(i)] = 0;
      continue;
    }
    auto rng = trial_rng(config.master_seed, static_cast<std::uint64_t>(i));
    LatticePoint pos = config.start;
    std::uint64_t t = 0;
    for (;;) {
      const std::uint64_t R = sampler(rng);
      if (R > budget - t) {
        if (es) ++exhausted;
        break;
      }
      t += R;
      if (simulate_step(pos, R, rng)) ++surrogate;
      if (set.contains(pos)) {
        out.hit_time[static_cast<std::size_t>(i)] = t;
        break;
      }
      if (es) {
        double r2 = 0.0;
        for (auto c : pos.coords) r2 += static_cast<double>(c) * static_cast<double>(c);
        if (r2 > esc2) break;
      }
    }
  }
  out.surrogate_jumps = surrogate;
  out.exhausted = exhausted;
  return out;
}

Wilson wilson_interval(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) throw DomainError("zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

double HittingEstimate::standard_error() const {
  return trials ? std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials)) : 0.0;
}

namespace {

// gap-to-1 exponents separating a power-law approach to 1 from saturation
constexpr double kMassiveExponent = -0.05;
constexpr double kFlatExponent = -0.03;

HittingEstimate summarize(const SimConfig& c, const LatticeSetSpec& set, const TrialOutcomes& o, std::uint64_t horizon) {
  HittingEstimate e;
  e.set = set.describe();
  e.start = c.start;
  e.trials = c.trials;
  e.hits = static_cast<std::uint64_t>(
      std::count_if(o.hit_time.begin(), o.hit_time.end(), [horizon](std::uint64_t t) { return t <= horizon; }));
  e.estimate = static_cast<double>(e.hits) / static_cast<double>(e.trials);
  const Wilson w = wilson_interval(e.hits, e.trials);
  e.ci_low = w.low;
  e.ci_high = w.high;
  e.seed = c.master_seed;
  e.surrogate_jumps = o.surrogate_jumps;
  e.exhausted = o.exhausted;
  if (std::holds_alternative<Horizon>(c.stopping)) {
    e.stopping = describe(Stopping{Horizon{horizon}});
    e.lower_bound = true;
    e.note = "horizon stopping: estimate is a lower bound for the hitting probability";
  } else {
    e.stopping = describe(c.stopping);
    if (o.exhausted == c.trials) e.note = "every trial exhausted its step budget";
    else if (o.exhausted) e.note = std::to_string(o.exhausted) + " trials exhausted their step budget";
  }
  if (o.surrogate_jumps) {
    if (!e.note.empty()) e.note += "; ";
    e.note += std::to_string(o.surrogate_jumps) + " increments above 1e9 base steps used the Gaussian surrogate";
  }
  return e;
}

std::optional<PointSet> finite_points(const LatticeSetSpec& s) {
  if (auto* e = std::get_if<LatticeSetSpec::Explicit>(&s.kind)) return e->points;
  if (auto* b = std::get_if<LatticeSetSpec::Ball>(&s.kind)) return lattice_ball(s.d, b->radius);
  if (auto* c = std::get_if<LatticeSetSpec::Cylinder>(&s.kind)) return lattice_cylinder(s.d, c->length, c->base);
  return std::nullopt;
}

}  // namespace

HittingEstimate hitting_probability(const SimConfig& config, const LatticeSetSpec& set, const GreenEvaluator* ev) {
  const TrialOutcomes o = run_trials(config, set);
  const std::uint64_t horizon =
      std::holds_alternative<Horizon>(config.stopping) ? std::get<Horizon>(config.stopping).base_steps : TrialOutcomes::kNever - 1;
  HittingEstimate e = summarize(config, set, o, horizon);
  if (auto* es = std::get_if<EscapeRadius>(&config.stopping); es && ev) {
    if (auto pts = finite_points(set)) {
      double far = 0.0;
      for (const auto& y : pts->points()) far = std::max(far, y.norm());
      const double gap = es->radius - far;
      if (gap >= 1.0) {
        const double cap = equilibrium(*ev, *pts).capacity;
        std::vector<std::int64_t> x(static_cast<std::size_t>(set.d), 0);
        x[0] = static_cast<std::int64_t>(std::floor(gap));
        e.return_bound = cap * ev->full_value(x);
      }
    }
  }
  return e;
}

TrendReport massiveness_trend(const SimConfig& config, const LatticeSetSpec& set,
                              const std::vector<std::int64_t>& distances, const std::vector<std::uint64_t>& horizons) {
  if (distances.empty() || horizons.empty()) throw DomainError("need at least one distance and one horizon");
  if (!std::is_sorted(distances.begin(), distances.end()) || !std::is_sorted(horizons.begin(), horizons.end()))
    throw DomainError("distances and horizons must be increasing");
  TrendReport rep;
  const double n = static_cast<double>(config.trials);
  bool all_massive = true, all_flat = true;
  std::vector<const HittingEstimate*> last;
  for (std::size_t j = 0; j < distances.size(); ++j) {
    SimConfig c = config;
    c.start = set.start_at_distance(distances[j]);
    c.stopping = Horizon{horizons.back()};
    c.master_seed = splitmix64(config.master_seed + j);
    const TrialOutcomes o = run_trials(c, set);
    for (auto h : horizons) rep.rows.push_back({distances[j], h, summarize(c, set, o, h)});
    const HittingEstimate& first = rep.rows[rep.rows.size() - horizons.size()].estimate;
    const HittingEstimate& fin = rep.rows.back().estimate;
    last.push_back(&fin);
    const double g0 = std::max(1.0 - first.estimate, 0.5 / n);
    const double g1 = std::max(1.0 - fin.estimate, 0.5 / n);
    const double span = horizons.size() > 1 ? std::log(static_cast<double>(horizons.back()) / static_cast<double>(horizons.front())) : 0.0;
    const double expo = span > 0.0 ? std::log(g1 / g0) / span : 0.0;
    rep.gap_exponent.push_back(expo);
    // new hits between the first and the last horizon, against their own noise
    const double fresh = static_cast<double>(fin.hits - first.hits);
    const bool shrinks = fresh > 3.0 * std::sqrt(std::max(fresh, 1.0) * (1.0 - fresh / n));
    const bool saturated = fin.estimate >= 0.99;
    all_massive = all_massive && (saturated || (expo <= kMassiveExponent && shrinks));
    all_flat = all_flat && expo > kFlatExponent && g1 > 3.0 * std::sqrt(fin.estimate * g1 / n);
  }
  bool decays = false;
  if (last.size() >= 2) {
    const auto* a = last.front();
    const auto* b = last.back();
    decays = a->estimate - b->estimate > 3.0 * std::hypot(a->standard_error(), b->standard_error());
  }
  std::ostringstream why;
  if (horizons.size() < 2) {
    rep.verdict = "inconclusive";
    why << "a single horizon cannot show a trend";
  } else if (all_massive) {
    rep.verdict = "massive-consistent";
    why << "at every distance the gap to 1 shrinks like a power of the horizon (exponent <= " << kMassiveExponent << ") or is below 0.01";
  } else if (all_flat && decays) {
    rep.verdict = "non-massive-consistent";
    why << "gaps to 1 stay put as the horizon grows and estimates fall with distance";
  } else {
    rep.verdict = "inconclusive";
    why << "mixed evidence";
  }
  rep.reason = why.str();
  return rep;
}

}  // namespace subwalk
