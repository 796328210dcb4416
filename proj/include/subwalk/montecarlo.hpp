#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/green.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/lattice_sets.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace subwalk {

struct Horizon {
  std::uint64_t base_steps;
};
struct EscapeRadius {
  double radius;
  std::uint64_t max_base_steps;
};
using Stopping = std::variant<Horizon, EscapeRadius>;
std::string describe(const Stopping& s);

struct SimConfig {
  int d = 3;
  BernsteinSpec spec = BernsteinSpec::power(1.0);
  LatticePoint start;
  std::uint64_t trials = 1000;
  Stopping stopping = Horizon{1u << 14};
  std::uint64_t master_seed = 1;
  std::size_t coefficient_terms = 4096;  // exact inverse-CDF range of the increment law
};

/// Increments above this many base steps use the Gaussian surrogate jump.
inline constexpr std::uint64_t kSurrogateCap = 1000000000ULL;

/// Stream for trial i: mt19937_64 seeded from splitmix64(master, i).
std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial);

/// Draws R with P(R = k) = c_k: inverse CDF for k <= N, a discrete power tail
/// P(k) ~ k^{-1-alpha/2} past N by inversion.
class IncrementSampler {
 public:
  explicit IncrementSampler(const SubordinationCoefficients& coeffs);
  std::uint64_t operator()(std::mt19937_64& rng) const;
  double tail_mass() const { return tail_; }
  std::size_t table_size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;  // cdf_[k-1] = sum_{j <= k} c_j
  double tail_ = 0.0;
  double a_ = 0.0;           // tail index alpha/2
};

/// Moves pos by R simple-walk steps. Returns true when the Gaussian surrogate was used.
bool simulate_step(LatticePoint& pos, std::uint64_t R, std::mt19937_64& rng);

struct TrialOutcomes {
  static constexpr std::uint64_t kNever = ~std::uint64_t{0};
  std::vector<std::uint64_t> hit_time;  // base time of the first arrival in the set, or kNever
  std::uint64_t surrogate_jumps = 0;
  std::uint64_t exhausted = 0;          // escape-radius trials that ran out of budget
};

/// Runs every trial to its stopping rule; membership is tested at arrival times.
TrialOutcomes run_trials(const SimConfig& config, const LatticeSetSpec& set);

struct HittingEstimate {
  std::string set;
  LatticePoint start;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // Wilson, 95%
  std::string stopping;
  std::uint64_t seed = 0;
  bool lower_bound = false;            // horizon stopping: hits after the horizon are missed
  std::uint64_t surrogate_jumps = 0;
  std::uint64_t exhausted = 0;
  std::optional<double> return_bound;  // escape radius, finite set, evaluator given
  std::string note;
  double standard_error() const;
};

struct Wilson {
  double low, high;
};
Wilson wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = 1.959964);

/// The evaluator, when given, supplies the capacity-based bound on returns after escape.
HittingEstimate hitting_probability(const SimConfig& config, const LatticeSetSpec& set,
                                    const GreenEvaluator* ev = nullptr);

struct TrendRow {
  std::int64_t distance = 0;
  std::uint64_t horizon = 0;
  HittingEstimate estimate;
};

struct TrendReport {
  std::vector<TrendRow> rows;         // by distance, then horizon
  std::vector<double> gap_exponent;   // per distance: log(gap_last/gap_first)/log(H_last/H_first)
  std::string verdict;                // "massive-consistent", "non-massive-consistent" or "inconclusive"
  std::string reason;
};

/// Hitting estimates from start_at_distance(r) for each r, under nested horizons.
TrendReport massiveness_trend(const SimConfig& config, const LatticeSetSpec& set,
                              const std::vector<std::int64_t>& distances, const std::vector<std::uint64_t>& horizons);

}  // namespace subwalk
