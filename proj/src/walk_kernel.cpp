#include "subwalk/walk_kernel.hpp"

#include "subwalk/errors.hpp"
#include "subwalk/numeric.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace subwalk {

std::vector<std::pair<LatticePoint, double>> step_kernel(int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  std::vector<std::pair<LatticePoint, double>> out;
  const double w = 1.0 / (2.0 * d);
  for (int i = 0; i < d; ++i)
    for (int s : {1, -1}) {
      auto e = LatticePoint::origin(d);
      e[static_cast<std::size_t>(i)] = s;
      out.emplace_back(std::move(e), w);
    }
  return out;
}

TransitionTable::TransitionTable(int d, int K, int R, std::size_t budget_bytes) : d_(d), K_(K), R_(R) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (K < 0 || R < 0) throw DomainError("K and R must be >= 0");
  const double pts = canonical_domain_size_estimate(d, K, R);
  // rough size: domain + neighbours + stored layers (about K/4 of the domain)
  const double est = pts * (8.0 + 12.0 * d + 4.0 + 8.0) + pts * static_cast<double>(K + 1) * 8.0 / 4.0;
  if (est > static_cast<double>(budget_bytes)) {
    std::ostringstream os;
    int k2 = K;
    while (k2 > 8) {
      k2 /= 2;
      const double p2 = canonical_domain_size_estimate(d, k2, std::min(R, k2));
      if (p2 * (8.0 + 12.0 * d + 4.0 + 8.0) + p2 * (k2 + 1) * 2.0 <= static_cast<double>(budget_bytes)) break;
    }
    os << "transition table (d=" << d << ", K=" << K << ", R=" << R << ") needs about " << est / 1048576.0
       << " MiB, budget " << budget_bytes / 1048576.0 << " MiB; try K=" << k2 << ", R=" << std::min(R, k2);
    throw BudgetExceeded(os.str());
  }
  domain_ = std::make_shared<CanonicalDomain>(d, K, R);
  index_layers();
  build();
  domain_->drop_neighbors();
}

void TransitionTable::index_layers() {
  const auto& dom = *domain_;
  rank_.assign(dom.size(), 0);
  for (int p = 0; p < 2; ++p) {
    auto lst = dom.parity_list(p);
    for (std::size_t r = 0; r < lst.size(); ++r) rank_[lst[r]] = static_cast<std::uint32_t>(r);
  }
  offset_.assign(static_cast<std::size_t>(K_) + 1, 0);
  count_.assign(static_cast<std::size_t>(K_) + 1, 0);
  std::size_t total = 0;
  for (int k = 0; k <= K_; ++k) {
    offset_[static_cast<std::size_t>(k)] = total;
    count_[static_cast<std::size_t>(k)] = dom.count_upto(k & 1, k);
    total += count_[static_cast<std::size_t>(k)];
  }
  values_.assign(total, 0.0);
}

void TransitionTable::build() {
  auto& dom = *domain_;
  dom.build_neighbors();
  std::vector<double> p(dom.size(), 0.0);
  const double w = 1.0 / (2.0 * d_);
  const auto origin = dom.find(LatticePoint::origin(d_));
  p[*origin] = 1.0;
  values_[0] = 1.0;
  for (int k = 1; k <= K_; ++k) {
    const auto lst = dom.parity_list(k & 1);
    const std::size_t n = count_[static_cast<std::size_t>(k)];
    double* layer = values_.data() + offset_[static_cast<std::size_t>(k)];
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint32_t i = lst[r];
      double s = 0.0;
      for (auto j : dom.neighbors(i))
        if (j != CanonicalDomain::kOutside) s += p[j];
      const double v = s * w;
      p[i] = v;
      layer[r] = v;
    }
  }
}

double TransitionTable::operator()(int k, const LatticePoint& x) const {
  if (k < 0 || k > K_) throw DomainError("step count outside the table range");
  if (x.dim() != d_) throw DomainError("dimension mismatch");
  if (!parity_matches(k, x) || x.norm1() > k) return 0.0;
  auto idx = domain_->find(x);
  if (!idx) return 0.0;
  const std::size_t r = rank_[*idx];
  if (r >= count_[static_cast<std::size_t>(k)]) return 0.0;
  return values_[offset_[static_cast<std::size_t>(k)] + r];
}

bool TransitionTable::is_exact(int k, const LatticePoint& x) const {
  if (K_ <= R_) return true;
  return static_cast<std::int64_t>(k) <= 2 * static_cast<std::int64_t>(R_) + 1 - x.norm_inf();
}

bool TransitionTable::operator==(const TransitionTable& o) const {
  return d_ == o.d_ && K_ == o.K_ && R_ == o.R_ && values_.size() == o.values_.size() &&
         std::memcmp(values_.data(), o.values_.data(), values_.size() * sizeof(double)) == 0;
}

namespace {
constexpr char kMagic[4] = {'S', 'W', 'T', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void TransitionTable::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open '" + path + "' for writing");
  const std::int32_t hdr[3] = {d_, K_, R_};
  const std::uint64_t n = values_.size();
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
  f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  f.write(reinterpret_cast<const char*>(&n), sizeof n);
  f.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) throw DomainError("write to '" + path + "' failed");
}

TransitionTable TransitionTable::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open '" + path + "'");
  char magic[4];
  std::uint32_t version = 0;
  std::int32_t hdr[3];
  std::uint64_t n = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), sizeof version);
  f.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  f.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!f || std::memcmp(magic, kMagic, 4) != 0) throw DomainError("'" + path + "' is not a transition table cache");
  if (version != kVersion) throw DomainError("unsupported transition table cache version");
  TransitionTable t;
  t.d_ = hdr[0];
  t.K_ = hdr[1];
  t.R_ = hdr[2];
  if (t.d_ < 1 || t.K_ < 0 || t.R_ < 0) throw DomainError("corrupt transition table header");
  t.domain_ = std::make_shared<CanonicalDomain>(t.d_, t.K_, t.R_);
  t.index_layers();
  if (t.values_.size() != n) throw DomainError("transition table cache size does not match its header");
  f.read(reinterpret_cast<char*>(t.values_.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) throw DomainError("truncated transition table cache");
  return t;
}

double gaussian_q(int d, double n, double norm2sq) {
  if (!(n >= 1.0)) throw DomainError("gaussian_q needs n >= 1");
  const double dd = d;
  return 2.0 * std::pow(dd / (2.0 * kPi * n), dd / 2.0) * std::exp(-dd * norm2sq / (2.0 * n));
}

CltError clt_error(const TransitionTable& table, int k, const LatticePoint& x) {
  CltError e;
  const double p = table(k, x);
  if (!parity_matches(k, x)) {
    e.error = p;
    e.parity_mismatch = true;
    return e;
  }
  e.error = p - gaussian_q(table.dim(), k, x);
  return e;
}

SubordinatedValue subordinated_pmf(const TransitionTable& table, const SubordinationCoefficients& coeffs, int n,
                                   const LatticePoint& x, double tolerance) {
  if (n < 1) throw DomainError("subordinated_pmf needs n >= 1");
  const int K = table.max_steps();
  const auto tau = tau_pmf(coeffs, static_cast<std::size_t>(n), static_cast<std::size_t>(K));
  CompensatedSum s;
  for (std::size_t i = 0; i < tau.probs.size(); ++i) {
    const int k = n + static_cast<int>(i);
    if (tau.probs[i] != 0.0 && parity_matches(k, x)) s.add(tau.probs[i] * table(k, x));
  }
  SubordinatedValue out;
  out.value = s.value();
  out.deficit = tau.deficit;
  const int keven = K - (K & 1);
  out.error_bound = tau.deficit * table(keven, LatticePoint::origin(table.dim()));
  if (out.error_bound > tolerance) {
    std::ostringstream os;
    os << "truncation bound " << out.error_bound << " exceeds tolerance " << tolerance << " (P(tau_n > " << K
       << ") = " << tau.deficit << "); use a larger K";
    throw DomainError(os.str());
  }
  return out;
}

}  // namespace subwalk
