#pragma once

#include "subwalk/green.hpp"
#include "subwalk/lattice.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace subwalk {

/// Finite, nonempty, deduplicated set of lattice points in canonical (sorted) order.
class PointSet {
 public:
  PointSet() = default;
  PointSet(int d, std::vector<LatticePoint> points);

  int dim() const { return d_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const std::vector<LatticePoint>& points() const { return pts_; }
  const LatticePoint& operator[](std::size_t i) const { return pts_[i]; }
  bool contains(const LatticePoint& x) const;

  LatticePoint lower() const;  // bounding box corners
  LatticePoint upper() const;
  double diameter() const;     // Euclidean, over the bounding box
  PointSet translated(const LatticePoint& z) const;
  PointSet united(const PointSet& o) const;

  static PointSet read(std::istream& in);  // one point per line, space separated
  void write(std::ostream& out) const;

 private:
  int d_ = 0;
  std::vector<LatticePoint> pts_;
};

/// {x : |x| <= r}
PointSet lattice_ball(int d, double r, const LatticePoint& center = {});
/// {|x'| <= base, 1 <= x_d <= L}
PointSet lattice_cylinder(int d, std::int64_t length, double base);
/// Each point becomes an s^d block: s.A = {s x + o : x in A, o in [-floor(s/2), s - 1 - floor(s/2)]^d}.
PointSet dilate(const PointSet& a, int s);

enum class CapacityMethod { LinearSolve, Variational };
const char* to_string(CapacityMethod m);

struct CapacityResult {
  double capacity = 0.0;
  std::vector<double> equilibrium;  // aligned with PointSet order
  double residual = 0.0;            // max_x |(G rho)(x) - 1| over the set
  CapacityMethod method = CapacityMethod::LinearSolve;
  std::string solver;               // "dense-llt", "fft-cg", "simplex"
  int iterations = 0;
  double min_weight = 0.0;
  bool negative_weights = false;    // some rho < -1e-10: Green error, not theory
  std::vector<std::string> warnings;
  std::size_t n_points = 0;
  int d = 0;
  double alpha = 0.0;
};

struct CapacityOptions {
  std::size_t dense_limit = 4096;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 20000;
};

/// G^0(x_i - x_j) for all pairs.
Eigen::MatrixXd green_matrix(const GreenEvaluator& ev, const PointSet& set);

/// Solve (G rho)(x) = 1 on the set.
CapacityResult equilibrium(const GreenEvaluator& ev, const PointSet& set, const CapacityOptions& opt = {});

/// max sum rho subject to rho >= 0 and G rho <= 1 on the set (simplex, <= 500 points).
CapacityResult capacity_variational(const GreenEvaluator& ev, const PointSet& set);
inline constexpr std::size_t kVariationalLimit = 500;

/// (G rho)(x) = sum_y G^0(x - y) rho(y); equals P_x(hit set) for the equilibrium rho.
double potential(const GreenEvaluator& ev, const PointSet& set, const std::vector<double>& rho, const LatticePoint& x);

/// Largest potential over lattice points within Euclidean distance `dist` of the set, outside it.
double max_halo_potential(const GreenEvaluator& ev, const PointSet& set, const std::vector<double>& rho,
                          double dist = 3.0);

struct ScanRow {
  double parameter = 0.0;  // radius, length or scale
  std::size_t n_points = 0;
  double capacity = 0.0;
  double normalizer = 0.0;  // chi(r), L or s^{d-alpha}
  double ratio = 0.0;       // capacity / normalizer
  double doubling = 0.0;    // Cap(2L)/Cap(L) against the previous row when it is half this one; else 0
};

/// Cap(B(0,r)) / (r^d psi(1/r^2)).
std::vector<ScanRow> ball_capacity_scan(const GreenEvaluator& ev, const std::vector<double>& radii,
                                        const CapacityOptions& opt = {});
/// Cap(F_L) / L for F_L = lattice_cylinder(d, L, base).
std::vector<ScanRow> cylinder_capacity_scan(const GreenEvaluator& ev, const std::vector<std::int64_t>& lengths,
                                            double base, const CapacityOptions& opt = {});
/// Cap(s.A) / s^{d-alpha}.
std::vector<ScanRow> scaling_check(const GreenEvaluator& ev, const PointSet& shape, const std::vector<int>& scales,
                                   const CapacityOptions& opt = {});

/// Largest ratio / smallest ratio over the rows.
double ratio_band(const std::vector<ScanRow>& rows);

}  // namespace subwalk
