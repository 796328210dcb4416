#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/capacity.hpp"
#include "subwalk/green.hpp"
#include "subwalk/lattice_sets.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subwalk {

/// chi(theta) = theta^d psi(1/theta^2).
struct GreenProfile {
  int d = 0;
  BernsteinSpec spec;
  double doubling = 0.0;     // max chi(2 theta)/chi(theta) over the check grid
  bool experimental = false; // psi is not a pure power
  double operator()(double theta) const;
};

GreenProfile chi_profile(const BernsteinSpec& spec, int d);

enum class WienerVerdict { DivergesLikely, ConvergesLikely, Inconclusive };
const char* to_string(WienerVerdict v);

struct WienerRow {
  int k = 0;
  std::size_t n_points = 0;   // |B_k|
  std::size_t n_solved = 0;   // points in the (possibly subsampled) solve
  int stride = 1;
  double capacity = 0.0;
  double chi = 0.0;           // chi(2^k)
  double term = 0.0;          // capacity / chi
  double partial_sum = 0.0;
  bool lower_bound = false;   // subsampled shell
};

struct WienerReport {
  std::string set;
  int d = 0;
  double alpha = 0.0;
  std::vector<WienerRow> rows;
  double fitted_decay_exponent = 0.0;  // slope of log2(term) against k
  double fit_residual = 0.0;           // rms of the fit in log2 units
  WienerVerdict verdict = WienerVerdict::Inconclusive;
  bool partial = false;                // a shell exceeded the budget; rows stop there
  std::vector<std::string> notes;
};

struct WienerOptions {
  std::size_t shell_budget = kShellBudget;
  CapacityOptions capacity;
};

WienerReport wiener_test(const GreenEvaluator& ev, const LatticeSetSpec& set, int k_min, int k_max,
                         const WienerOptions& opt = {});

enum class ThornVerdict { Massive, NonMassive, Undetermined };
const char* to_string(ThornVerdict v);

struct ThornTerms {
  std::vector<int> n;
  std::vector<double> terms;  // (t(2^n)/2^n)^{d-alpha-1}
  ThornVerdict verdict = ThornVerdict::Undetermined;
  std::string reason;
};

/// True when t(n)/n does not decay: the fat-thorn rule applies instead.
bool is_fat(const ThornProfile& profile);

/// Terms of the thin-thorn series; throws DomainError for fat profiles or d - alpha - 1 <= 0.
ThornTerms thorn_series_terms(const ThornProfile& profile, int d, double alpha, int n_min, int n_max);

struct FatThornWitness {
  int n = 0;
  double radius = 0.0;          // min(delta, 1) 2^{n-2}
  LatticePoint center;          // (0, ..., 0, 3 2^{n-1})
  bool contained = false;       // every lattice point of the ball lies in the thorn
};

struct FatThornResult {
  ThornVerdict verdict = ThornVerdict::Massive;
  double delta = 0.0;  // limsup t(n)/n estimate
  std::vector<FatThornWitness> witnesses;
};

/// Inscribed-ball rule for thorns with limsup t(n)/n > 0. Throws DomainError when the profile is thin.
FatThornResult fat_thorn_rule(const ThornProfile& profile, int d, double alpha, int n_max = 6);

struct ThornClassification {
  ThornVerdict verdict = ThornVerdict::Undetermined;
  std::string route;  // "fat-thorn" or "series"
  std::string reason;
  std::optional<ThornTerms> terms;
  std::optional<FatThornResult> fat;
};

ThornClassification classify_thorn(const ThornProfile& profile, int d, double alpha);

struct ThornConsistencyRow {
  int n = 0;
  double shell_term = 0.0;
  double analytic_term = 0.0;
  double ratio = 0.0;
  bool lower_bound = false;
};

struct ThornConsistency {
  std::vector<ThornConsistencyRow> rows;
  double band = 0.0;  // max ratio / min ratio
};

/// Shell-capacity Wiener terms against the analytic thorn terms.
ThornConsistency thorn_consistency(const GreenEvaluator& ev, const ThornProfile& profile, int n_min, int n_max,
                                   const WienerOptions& opt = {});

struct HyperplaneRow {
  double epsilon = 0.0;
  double integral = 0.0;
};

struct HyperplaneReport {
  int d = 0;
  double alpha = 0.0;
  std::vector<HyperplaneRow> rows;  // in the order given
  std::vector<double> decade_growth;  // I(eps/10) - I(eps) along the sorted epsilons
  bool bounded = false;             // increments shrink geometrically
  std::string verdict;              // "non-massive" or "massive"
};

/// I(eps) = (1/2pi) int_{eps <= |xi| <= pi} dxi / (1 - h(xi)), h(xi) = 1 - d^{-alpha/2}(1 - cos xi)^{alpha/2}.
HyperplaneReport hyperplane_return_sum(int d, double alpha, const std::vector<double>& epsilons);

/// Leading small-eps growth of I per decade when alpha = 1.
double hyperplane_log_rate(int d);

}  // namespace subwalk
