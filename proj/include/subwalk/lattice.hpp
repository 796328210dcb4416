#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace subwalk {

struct LatticePoint {
  std::vector<std::int64_t> coords;

  LatticePoint() = default;
  explicit LatticePoint(std::vector<std::int64_t> c) : coords(std::move(c)) {}
  LatticePoint(std::initializer_list<std::int64_t> c) : coords(c) {}
  static LatticePoint origin(int d) { return LatticePoint(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)); }

  int dim() const { return static_cast<int>(coords.size()); }
  std::int64_t operator[](std::size_t i) const { return coords[i]; }
  std::int64_t& operator[](std::size_t i) { return coords[i]; }

  std::int64_t norm2sq() const;
  double norm() const;
  std::int64_t norm_inf() const;
  std::int64_t norm1() const;
  int parity() const { return static_cast<int>(norm1() & 1); }
  bool is_origin() const;

  /// Representative under the hyperoctahedral group: |x_i| sorted decreasing.
  LatticePoint canonical() const;

  LatticePoint operator+(const LatticePoint& o) const;
  LatticePoint operator-(const LatticePoint& o) const;
  LatticePoint operator-() const;
  auto operator<=>(const LatticePoint&) const = default;
  bool operator==(const LatticePoint&) const = default;

  std::string str() const;  // "1,2,3"
};

/// Parses "x1,x2,...,xd". Throws DomainError on malformed input.
LatticePoint parse_point(const std::string& text);

/// n <-> x: the walk can be at x after n steps only if n and |x|_1 share parity.
inline bool parity_matches(std::int64_t n, const LatticePoint& x) { return ((n - x.norm1()) & 1) == 0; }

/// Canonical tuples x_0 >= ... >= x_{d-1} >= 0 with |x|_1 <= K and |x|_inf <= R.
/// One representative per hyperoctahedral orbit; indices are 32-bit.
class CanonicalDomain {
 public:
  static constexpr std::uint32_t kOutside = 0xffffffffu;

  CanonicalDomain(int d, std::int64_t max_norm1, std::int64_t max_coord);

  int dim() const { return d_; }
  std::int64_t max_norm1() const { return k_; }
  std::int64_t max_coord() const { return r_; }
  std::size_t size() const { return size_; }

  /// Index of the orbit of x (any signs/order), or nullopt outside the domain.
  std::optional<std::uint32_t> find(std::span<const std::int64_t> x) const;
  std::optional<std::uint32_t> find(const LatticePoint& x) const { return find(std::span<const std::int64_t>(x.coords)); }

  std::span<const std::int32_t> coords(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  LatticePoint point(std::size_t i) const;
  std::int32_t norm1(std::size_t i) const { return norm1_[i]; }
  std::int64_t norm2sq(std::size_t i) const;
  std::int32_t norm_inf(std::size_t i) const { return coords_[i * static_cast<std::size_t>(d_)]; }
  /// Number of lattice points in the orbit.
  double multiplicity(std::size_t i) const;

  /// Indices of the given parity, ordered by |x|_1.
  std::span<const std::uint32_t> parity_list(int parity) const { return by_parity_[parity & 1]; }
  /// Prefix length of parity_list(parity) with |x|_1 <= n1.
  std::size_t count_upto(int parity, std::int64_t n1) const;

  /// Build the 2d-neighbor table (x +- e_i, canonicalized). Costs 8d bytes per point.
  void build_neighbors();
  void drop_neighbors();
  bool has_neighbors() const { return !nbr_.empty(); }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {nbr_.data() + i * 2 * static_cast<std::size_t>(d_), 2 * static_cast<std::size_t>(d_)};
  }

  std::size_t memory_bytes() const;

 private:
  void build_rank_tables();
  std::uint64_t prefix(int m, std::int64_t c, std::int64_t b) const;

  int d_;
  std::int64_t k_, r_;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint32_t> perm_;  // lexicographic rank -> storage index
  std::vector<std::int32_t> coords_;
  std::vector<std::int32_t> norm1_;
  std::vector<std::uint32_t> by_parity_[2];
  std::vector<std::uint32_t> nbr_;
};

/// Estimated number of canonical points, for budget checks before building.
double canonical_domain_size_estimate(int d, std::int64_t max_norm1, std::int64_t max_coord);

}  // namespace subwalk
