#include "subwalk/lattice.hpp"

#include "subwalk/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace subwalk {

std::int64_t LatticePoint::norm2sq() const {
  std::int64_t s = 0;
  for (auto c : coords) s += c * c;
  return s;
}

double LatticePoint::norm() const { return std::sqrt(static_cast<double>(norm2sq())); }

std::int64_t LatticePoint::norm_inf() const {
  std::int64_t m = 0;
  for (auto c : coords) m = std::max(m, c < 0 ? -c : c);
  return m;
}

std::int64_t LatticePoint::norm1() const {
  std::int64_t s = 0;
  for (auto c : coords) s += c < 0 ? -c : c;
  return s;
}

bool LatticePoint::is_origin() const {
  return std::all_of(coords.begin(), coords.end(), [](auto c) { return c == 0; });
}

LatticePoint LatticePoint::canonical() const {
  LatticePoint out = *this;
  for (auto& c : out.coords) c = c < 0 ? -c : c;
  std::sort(out.coords.begin(), out.coords.end(), std::greater<>());
  return out;
}

LatticePoint LatticePoint::operator+(const LatticePoint& o) const {
  if (o.dim() != dim()) throw DomainError("dimension mismatch");
  LatticePoint r = *this;
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] += o.coords[i];
  return r;
}

LatticePoint LatticePoint::operator-(const LatticePoint& o) const {
  if (o.dim() != dim()) throw DomainError("dimension mismatch");
  LatticePoint r = *this;
  for (std::size_t i = 0; i < coords.size(); ++i) r.coords[i] -= o.coords[i];
  return r;
}

LatticePoint LatticePoint::operator-() const {
  LatticePoint r = *this;
  for (auto& c : r.coords) c = -c;
  return r;
}

std::string LatticePoint::str() const {
  std::string s;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(coords[i]);
  }
  return s;
}

LatticePoint parse_point(const std::string& text) {
  LatticePoint p;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string tok = text.substr(pos, end - pos);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.erase(tok.begin());
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
    std::int64_t v = 0;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (tok.empty() || ec != std::errc() || ptr != e) throw DomainError("malformed lattice point '" + text + "'");
    p.coords.push_back(v);
    pos = end + 1;
  }
  if (p.coords.empty()) throw DomainError("empty lattice point");
  return p;
}

namespace {

template <class F>
void enumerate_canonical(int d, std::int64_t k, std::int64_t r, F&& visit) {
  std::vector<std::int64_t> x(static_cast<std::size_t>(d), 0);
  std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int i, std::int64_t cap, std::int64_t left) {
    if (i == d) {
      visit(x);
      return;
    }
    const std::int64_t hi = std::min(cap, left);
    for (std::int64_t v = 0; v <= hi; ++v) {
      x[static_cast<std::size_t>(i)] = v;
      rec(i + 1, v, left - v);
    }
  };
  rec(0, r, k);
}

}  // namespace

double canonical_domain_size_estimate(int d, std::int64_t max_norm1, std::int64_t max_coord) {
  // volume of the sorted simplex / sorted cube, whichever is smaller, with a
  // boundary allowance
  const double fact = std::tgamma(static_cast<double>(d) + 1.0);
  const double k = static_cast<double>(max_norm1) + d;
  const double r = static_cast<double>(std::min(max_coord, max_norm1)) + 1.0;
  return std::min(std::pow(k, d) / (fact * fact), std::pow(r, d) / fact) + 1.0;
}

CanonicalDomain::CanonicalDomain(int d, std::int64_t max_norm1, std::int64_t max_coord)
    : d_(d), k_(max_norm1), r_(max_coord) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (max_norm1 < 0 || max_coord < 0) throw DomainError("domain radii must be >= 0");
  r_ = std::min(r_, k_);
  build_rank_tables();
  const std::uint64_t total = prefix(d_ - 1, r_ + 1, k_);
  if (total >= kOutside) throw BudgetExceeded("canonical domain exceeds 32-bit indexing");
  size_ = static_cast<std::size_t>(total);
  coords_.reserve(size_ * static_cast<std::size_t>(d));
  norm1_.reserve(size_);

  enumerate_canonical(d, k_, r_, [&](const std::vector<std::int64_t>& x) {
    std::int64_t s = 0;
    for (auto v : x) {
      coords_.push_back(static_cast<std::int32_t>(v));
      s += v;
    }
    norm1_.push_back(static_cast<std::int32_t>(s));
  });

  // Store points shell by shell (|x|_1, then lexicographic): a walk step only
  // touches adjacent shells, which keeps the dynamic programming cache-local.
  std::vector<std::uint32_t> order(size_);
  for (std::uint32_t i = 0; i < size_; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return norm1_[a] < norm1_[b]; });
  std::vector<std::int32_t> coords(coords_.size()), norm1(size_);
  perm_.assign(size_, 0);
  const std::size_t dd = static_cast<std::size_t>(d);
  for (std::uint32_t j = 0; j < size_; ++j) {
    const std::uint32_t i = order[j];
    perm_[i] = j;
    norm1[j] = norm1_[i];
    std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(i * dd), dd, coords.begin() + static_cast<std::ptrdiff_t>(j * dd));
  }
  coords_.swap(coords);
  norm1_.swap(norm1);

  for (int p = 0; p < 2; ++p) {
    auto& lst = by_parity_[p];
    for (std::uint32_t i = 0; i < size_; ++i)
      if ((norm1_[i] & 1) == p) lst.push_back(i);
  }
}

// count(m, c, b): nonincreasing m-tuples with entries <= c and sum <= b.
// prefix(m, c, b) = sum_{v < c, v <= b} count(m, v, b - v), the (m+1)-tuples
// whose leading entry is below c. Points are enumerated in lexicographic
// order, so the rank of x is a sum of such prefixes.
void CanonicalDomain::build_rank_tables() {
  const std::size_t nc = static_cast<std::size_t>(r_) + 2, nb = static_cast<std::size_t>(k_) + 1;
  std::vector<std::uint64_t> count(nc * nb, 1), next(nc * nb);
  prefix_.assign(static_cast<std::size_t>(d_) * nc * nb, 0);
  for (std::size_t m = 0; m < static_cast<std::size_t>(d_); ++m) {
    for (std::size_t b = 0; b < nb; ++b) {
      std::uint64_t acc = 0;
      for (std::size_t c = 1; c < nc; ++c) {
        const std::size_t v = c - 1;
        if (v <= b) acc += count[v * nb + (b - v)];
        prefix_[(m * nc + c) * nb + b] = acc;
      }
    }
    // tuples of length m+1 with entries <= c: leading entry <= c
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t b = 0; b < nb; ++b) next[c * nb + b] = prefix_[(m * nc + std::min(c + 1, nc - 1)) * nb + b];
    count.swap(next);
  }
}

std::uint64_t CanonicalDomain::prefix(int m, std::int64_t c, std::int64_t b) const {
  const std::size_t nc = static_cast<std::size_t>(r_) + 2, nb = static_cast<std::size_t>(k_) + 1;
  return prefix_[(static_cast<std::size_t>(m) * nc + static_cast<std::size_t>(c)) * nb + static_cast<std::size_t>(b)];
}

std::optional<std::uint32_t> CanonicalDomain::find(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != d_) throw DomainError("dimension mismatch in domain lookup");
  std::int64_t buf[16];
  std::vector<std::int64_t> heap;
  std::int64_t* a = buf;
  if (x.size() > 16) {
    heap.resize(x.size());
    a = heap.data();
  }
  std::int64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    a[i] = x[i] < 0 ? -x[i] : x[i];
    s += a[i];
    if (a[i] > r_) return std::nullopt;
  }
  if (s > k_) return std::nullopt;
  if (x.size() == 3) {
    if (a[0] < a[1]) std::swap(a[0], a[1]);
    if (a[1] < a[2]) std::swap(a[1], a[2]);
    if (a[0] < a[1]) std::swap(a[0], a[1]);
  } else {
    std::sort(a, a + x.size(), std::greater<>());
  }
  std::uint64_t rank = 0;
  std::int64_t left = k_;
  for (int i = 0; i < d_; ++i) {
    rank += prefix(d_ - 1 - i, a[i], left);
    left -= a[i];
  }
  return perm_[rank];
}

LatticePoint CanonicalDomain::point(std::size_t i) const {
  LatticePoint p;
  for (auto v : coords(i)) p.coords.push_back(v);
  return p;
}

std::int64_t CanonicalDomain::norm2sq(std::size_t i) const {
  std::int64_t s = 0;
  for (auto v : coords(i)) s += static_cast<std::int64_t>(v) * v;
  return s;
}

double CanonicalDomain::multiplicity(std::size_t i) const {
  auto c = coords(i);
  double m = 1.0;
  int nonzero = 0;
  for (auto v : c) nonzero += v != 0;
  // d! / prod(run lengths)!
  double perms = std::tgamma(static_cast<double>(d_) + 1.0);
  std::size_t j = 0;
  while (j < c.size()) {
    std::size_t e = j;
    while (e < c.size() && c[e] == c[j]) ++e;
    perms /= std::tgamma(static_cast<double>(e - j) + 1.0);
    j = e;
  }
  m = std::round(perms) * std::ldexp(1.0, nonzero);
  return m;
}

std::size_t CanonicalDomain::count_upto(int parity, std::int64_t n1) const {
  const auto& lst = by_parity_[parity & 1];
  auto it = std::upper_bound(lst.begin(), lst.end(), n1, [&](std::int64_t v, std::uint32_t i) { return v < norm1_[i]; });
  return static_cast<std::size_t>(it - lst.begin());
}

void CanonicalDomain::build_neighbors() {
  if (!nbr_.empty()) return;
  const std::size_t dd = static_cast<std::size_t>(d_);
  nbr_.assign(size() * 2 * dd, kOutside);
  std::vector<std::int64_t> y(dd);
  for (std::size_t i = 0; i < size(); ++i) {
    auto c = coords(i);
    for (std::size_t j = 0; j < dd; ++j) {
      for (int s = 0; s < 2; ++s) {
        for (std::size_t t = 0; t < dd; ++t) y[t] = c[t];
        y[j] += s ? -1 : 1;
        auto idx = find(y);
        nbr_[i * 2 * dd + 2 * j + static_cast<std::size_t>(s)] = idx ? *idx : kOutside;
      }
    }
  }
}

void CanonicalDomain::drop_neighbors() {
  nbr_.clear();
  nbr_.shrink_to_fit();
}

std::size_t CanonicalDomain::memory_bytes() const {
  return prefix_.size() * sizeof(std::uint64_t) + perm_.size() * sizeof(std::uint32_t) + coords_.size() * sizeof(std::int32_t) +
         norm1_.size() * sizeof(std::int32_t) + (by_parity_[0].size() + by_parity_[1].size()) * sizeof(std::uint32_t) +
         nbr_.size() * sizeof(std::uint32_t);
}

}  // namespace subwalk
