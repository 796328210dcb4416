#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace subwalk {

/// Simple random walk: the 2d unit neighbours, each with mass 1/(2d).
std::vector<std::pair<LatticePoint, double>> step_kernel(int d);

/// Exact p(k, x) for k <= K on the canonical domain |x|_1 <= K, |x|_inf <= R.
/// Only entries with k <-> x and |x|_1 <= k are stored.
class TransitionTable {
 public:
  static constexpr std::size_t kDefaultBudgetBytes = std::size_t{512} << 20;

  TransitionTable(int d, int K, int R, std::size_t budget_bytes = kDefaultBudgetBytes);

  int dim() const { return d_; }
  int max_steps() const { return K_; }
  int radius() const { return R_; }
  const CanonicalDomain& domain() const { return *domain_; }

  /// p(k, x); zero outside the support. Throws DomainError for k > K.
  double operator()(int k, const LatticePoint& x) const;
  /// True when the value at (k, x) is not affected by the L_inf cutoff.
  bool is_exact(int k, const LatticePoint& x) const;
  /// True if x lies inside the stored domain (values outside are reported as 0).
  bool covers(const LatticePoint& x) const { return domain_->find(x).has_value(); }

  void save(const std::string& path) const;
  static TransitionTable load(const std::string& path);

  std::size_t stored_values() const { return values_.size(); }
  bool operator==(const TransitionTable& o) const;

 private:
  TransitionTable() = default;
  void build();
  void index_layers();

  int d_ = 0, K_ = 0, R_ = 0;
  std::shared_ptr<CanonicalDomain> domain_;
  std::vector<std::uint32_t> rank_;     // position within its parity list
  std::vector<std::size_t> offset_;     // start of layer k in values_
  std::vector<std::size_t> count_;      // entries in layer k
  std::vector<double> values_;
};

inline TransitionTable pmf_table(int d, int K, int R,
                                 std::size_t budget_bytes = TransitionTable::kDefaultBudgetBytes) {
  return TransitionTable(d, K, R, budget_bytes);
}

/// Local CLT surrogate 2 (d / 2 pi n)^{d/2} exp(-d |x|^2 / 2n).
double gaussian_q(int d, double n, double norm2sq);
inline double gaussian_q(int d, double n, const LatticePoint& x) {
  return gaussian_q(d, n, static_cast<double>(x.norm2sq()));
}

struct CltError {
  double error = 0.0;          // p - q, or p alone on parity mismatch
  bool parity_mismatch = false;
};

CltError clt_error(const TransitionTable& table, int k, const LatticePoint& x);

struct SubordinatedValue {
  double value = 0.0;
  double deficit = 0.0;      // P(tau_n > K)
  double error_bound = 0.0;  // deficit * max_{k > K} p(k, x)
};

/// p_psi(n, x) = sum_k p(k, x) P(tau_n = k) over k <= K. Throws DomainError if
/// the truncation bound exceeds `tolerance`.
SubordinatedValue subordinated_pmf(const TransitionTable& table, const SubordinationCoefficients& coeffs, int n,
                                   const LatticePoint& x, double tolerance = 1.0);

}  // namespace subwalk
