#pragma once

#include "subwalk/capacity.hpp"
#include "subwalk/lattice.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace subwalk {

/// Radius profile t(n) of a thorn {|x'| <= t(x_d), x_d >= 1}.
struct ThornProfile {
  struct Linear { double delta; };       // t(n) = delta n
  struct Power { double gamma; };        // t(n) = n^gamma, 0 < gamma < 1
  struct LinOverLog { double beta; };    // t(n) = n / log(1 + n)^beta
  struct Table { std::vector<double> values; };  // t(n) = values[n - 1], held constant past the end

  std::variant<Linear, Power, LinOverLog, Table> shape;

  static ThornProfile linear(double delta);
  static ThornProfile power(double gamma);
  static ThornProfile lin_over_log(double beta);
  static ThornProfile table(std::vector<double> values);

  double operator()(double n) const;
  std::string describe() const;
};

struct LatticeSetSpec {
  struct Axis {};                          // {(n, 0, ..., 0) : n >= 1}
  struct Hyperplane { int coordinate; };   // {x : x_i = 0}
  struct Ball { double radius; };          // {|x| <= r}
  struct Cylinder { std::int64_t length; double base; };
  struct Cone { double slope; };           // {|x'| <= slope x_d, x_d >= 1}
  struct Thorn { ThornProfile profile; };
  struct Explicit { PointSet points; };

  int d = 3;
  std::variant<Axis, Hyperplane, Ball, Cylinder, Cone, Thorn, Explicit> kind;

  static LatticeSetSpec axis(int d);
  static LatticeSetSpec hyperplane(int d, int coordinate = 0);
  static LatticeSetSpec ball(int d, double r);
  static LatticeSetSpec cylinder(int d, std::int64_t length, double base);
  static LatticeSetSpec cone(int d, double slope);
  static LatticeSetSpec thorn(int d, ThornProfile profile);
  static LatticeSetSpec explicit_set(PointSet points);

  bool contains(const LatticePoint& x) const;
  bool contains(std::span<const std::int64_t> x) const;
  bool is_finite() const;
  std::string describe() const;

  /// A start point at Euclidean distance about r from the set, outside it.
  LatticePoint start_at_distance(std::int64_t r) const;
};

/// Parses "axis", "hyperplane[:i]", "ball:r", "cylinder:L:base", "cone:delta",
/// "thorn:linear:delta", "thorn:power:gamma", "thorn:linoverlog:beta", "file:path".
LatticeSetSpec parse_set(const std::string& text, int d);

inline constexpr std::size_t kShellBudget = 120000;

struct Shell {
  int k = 0;
  PointSet points;            // possibly subsampled
  std::size_t full_count = 0; // |B_k|
  int stride = 1;             // sublattice spacing used for subsampling
  bool subsampled() const { return stride > 1; }
};

/// B_k = {x in set : 2^k <= |x| < 2^{k+1}}. Throws BudgetExceeded with the
/// count when |B_k| exceeds max_points.
PointSet shell(const LatticeSetSpec& set, int k, std::size_t max_points = 10000000);

/// Same enumeration, intersected with (stride Z)^d, stride the smallest
/// keeping the subset within budget. The subset's capacity is a lower bound.
Shell sampled_shell(const LatticeSetSpec& set, int k, std::size_t budget = kShellBudget);

}  // namespace subwalk
