#include "subwalk/capacity.hpp"

#include "fft.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/numeric.hpp"
#include "subwalk/simplex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace subwalk {

PointSet::PointSet(int d, std::vector<LatticePoint> points) : d_(d), pts_(std::move(points)) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  for (const auto& p : pts_)
    if (p.dim() != d) throw DomainError("point " + p.str() + " has the wrong dimension");
  std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

bool PointSet::contains(const LatticePoint& x) const { return std::binary_search(pts_.begin(), pts_.end(), x); }

LatticePoint PointSet::lower() const {
  if (pts_.empty()) throw DomainError("empty point set");
  LatticePoint lo = pts_.front();
  for (const auto& p : pts_)
    for (std::size_t i = 0; i < lo.coords.size(); ++i) lo[i] = std::min(lo[i], p[i]);
  return lo;
}

LatticePoint PointSet::upper() const {
  if (pts_.empty()) throw DomainError("empty point set");
  LatticePoint hi = pts_.front();
  for (const auto& p : pts_)
    for (std::size_t i = 0; i < hi.coords.size(); ++i) hi[i] = std::max(hi[i], p[i]);
  return hi;
}

double PointSet::diameter() const { return (upper() - lower()).norm(); }

PointSet PointSet::translated(const LatticePoint& z) const {
  std::vector<LatticePoint> v;
  v.reserve(pts_.size());
  for (const auto& p : pts_) v.push_back(p + z);
  return PointSet(d_, std::move(v));
}

PointSet PointSet::united(const PointSet& o) const {
  if (o.d_ != d_) throw DomainError("dimension mismatch");
  std::vector<LatticePoint> v = pts_;
  v.insert(v.end(), o.pts_.begin(), o.pts_.end());
  return PointSet(d_, std::move(v));
}

PointSet PointSet::read(std::istream& in) {
  std::vector<LatticePoint> pts;
  std::string line;
  int d = 0;
  while (std::getline(in, line)) {
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    LatticePoint p;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw DomainError("malformed point set line: '" + line + "'");
      p.coords.push_back(v);
    }
    if (p.coords.empty()) continue;
    if (d == 0) d = p.dim();
    if (p.dim() != d) throw DomainError("inconsistent dimensions in point set");
    pts.push_back(std::move(p));
  }
  if (pts.empty()) throw DomainError("point set is empty");
  return PointSet(d, std::move(pts));
}

void PointSet::write(std::ostream& out) const {
  for (const auto& p : pts_) {
    for (std::size_t i = 0; i < p.coords.size(); ++i) out << (i ? " " : "") << p[i];
    out << '\n';
  }
}

namespace {

constexpr double kMaxEnumeration = 5e7;

template <class F>
void for_box(const LatticePoint& lo, const LatticePoint& hi, F&& f) {
  LatticePoint x = lo;
  const std::size_t d = lo.coords.size();
  for (;;) {
    f(x);
    std::size_t i = 0;
    while (i < d) {
      if (x[i] < hi[i]) {
        ++x[i];
        break;
      }
      x[i] = lo[i];
      ++i;
    }
    if (i == d) return;
  }
}

}  // namespace

PointSet lattice_ball(int d, double r, const LatticePoint& center) {
  if (!(r >= 0.0)) throw DomainError("ball radius must be >= 0");
  const LatticePoint c = center.coords.empty() ? LatticePoint::origin(d) : center;
  if (c.dim() != d) throw DomainError("center has the wrong dimension");
  const auto R = static_cast<std::int64_t>(std::floor(r));
  if (std::pow(2.0 * static_cast<double>(R) + 1.0, d) > kMaxEnumeration)
    throw BudgetExceeded("ball of radius " + std::to_string(r) + " is too large to enumerate");
  LatticePoint lo = c, hi = c;
  for (std::size_t i = 0; i < lo.coords.size(); ++i) {
    lo[i] -= R;
    hi[i] += R;
  }
  std::vector<LatticePoint> pts;
  const double r2 = r * r + 1e-9;
  for_box(lo, hi, [&](const LatticePoint& x) {
    if (static_cast<double>((x - c).norm2sq()) <= r2) pts.push_back(x);
  });
  return PointSet(d, std::move(pts));
}

PointSet lattice_cylinder(int d, std::int64_t length, double base) {
  if (d < 2) throw DomainError("cylinder needs d >= 2");
  if (length < 1 || !(base >= 0.0)) throw DomainError("cylinder needs L >= 1 and base >= 0");
  const auto B = static_cast<std::int64_t>(std::floor(base));
  if (static_cast<double>(length) * std::pow(2.0 * static_cast<double>(B) + 1.0, d - 1) > kMaxEnumeration)
    throw BudgetExceeded("cylinder is too large to enumerate");
  LatticePoint lo = LatticePoint::origin(d), hi = LatticePoint::origin(d);
  for (int i = 0; i + 1 < d; ++i) {
    lo[static_cast<std::size_t>(i)] = -B;
    hi[static_cast<std::size_t>(i)] = B;
  }
  lo[static_cast<std::size_t>(d - 1)] = 1;
  hi[static_cast<std::size_t>(d - 1)] = length;
  std::vector<LatticePoint> pts;
  const double b2 = base * base + 1e-9;
  for_box(lo, hi, [&](const LatticePoint& x) {
    std::int64_t s = 0;
    for (int i = 0; i + 1 < d; ++i) s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    if (static_cast<double>(s) <= b2) pts.push_back(x);
  });
  return PointSet(d, std::move(pts));
}

PointSet dilate(const PointSet& a, int s) {
  if (s < 1) throw DomainError("scale must be >= 1");
  const int d = a.dim();
  if (static_cast<double>(a.size()) * std::pow(static_cast<double>(s), d) > kMaxEnumeration)
    throw BudgetExceeded("dilated set is too large to enumerate");
  const std::int64_t off = s / 2;
  LatticePoint lo = LatticePoint::origin(d), hi = LatticePoint::origin(d);
  for (int i = 0; i < d; ++i) {
    lo[static_cast<std::size_t>(i)] = -off;
    hi[static_cast<std::size_t>(i)] = s - 1 - off;
  }
  std::vector<LatticePoint> pts;
  for (const auto& x : a.points()) {
    LatticePoint base = x;
    for (auto& c : base.coords) c *= s;
    for_box(lo, hi, [&](const LatticePoint& o) { pts.push_back(base + o); });
  }
  return PointSet(d, std::move(pts));
}

const char* to_string(CapacityMethod m) { return m == CapacityMethod::LinearSolve ? "linear_solve" : "variational"; }

namespace {

// G^0 tabulated on |difference| in the bounding box of the set.
struct KernelTable {
  std::vector<std::int64_t> extent;  // n_i
  std::vector<double> values;        // row-major over [0, n_0) x ... x [0, n_{d-1})
  std::int64_t step = 1;             // all differences are multiples of step

  double at(const LatticePoint& a, const LatticePoint& b) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < extent.size(); ++i) {
      std::int64_t v = a[i] - b[i];
      idx = idx * static_cast<std::size_t>(extent[i]) + static_cast<std::size_t>((v < 0 ? -v : v) / step);
    }
    return values[idx];
  }
};

KernelTable tabulate(const GreenEvaluator& ev, const PointSet& set) {
  if (set.empty()) throw DomainError("empty point set");
  if (set.dim() != ev.dim()) throw DomainError("set dimension differs from the evaluator's");
  KernelTable t;
  const LatticePoint lo = set.lower(), hi = set.upper();
  // subsampled sets live on a coarser sublattice; only its differences are needed
  std::int64_t g = 0;
  for (const auto& p : set.points())
    for (std::size_t i = 0; i < lo.coords.size(); ++i) g = std::gcd(g, p[i] - lo[i]);
  t.step = std::max<std::int64_t>(g, 1);
  double total = 1.0;
  for (std::size_t i = 0; i < lo.coords.size(); ++i) {
    t.extent.push_back((hi[i] - lo[i]) / t.step + 1);
    total *= static_cast<double>(t.extent.back());
  }
  if (total > 2e7) {
    std::ostringstream os;
    os << "Green kernel table over the bounding box would hold " << total << " entries; use a smaller set";
    throw BudgetExceeded(os.str());
  }
  t.values.resize(static_cast<std::size_t>(total));
  const LatticePoint zero = LatticePoint::origin(set.dim());
  LatticePoint top = zero;
  for (std::size_t i = 0; i < top.coords.size(); ++i) top[i] = t.extent[i] - 1;
  // canonical orbits repeat within the box; evaluate each once
  std::map<LatticePoint, double> seen;
  for_box(zero, top, [&](const LatticePoint& x) {
    // for_box runs the first coordinate fastest; compute the row-major index explicitly
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.coords.size(); ++i) k = k * static_cast<std::size_t>(t.extent[i]) + static_cast<std::size_t>(x[i]);
    LatticePoint y = x;
    for (auto& v : y.coords) v *= t.step;
    const LatticePoint c = y.canonical();
    auto it = seen.find(c);
    double v;
    if (it == seen.end()) {
      v = ev.green_full(c).value;
      seen.emplace(c, v);
    } else {
      v = it->second;
    }
    t.values[k] = v;
  });
  return t;
}

CapacityResult finish(const GreenEvaluator& ev, const PointSet& set, std::vector<double> rho, double residual,
                      CapacityMethod method, std::string solver, int iterations) {
  CapacityResult r;
  r.equilibrium = std::move(rho);
  r.capacity = compensated_sum(r.equilibrium);
  r.residual = residual;
  r.method = method;
  r.solver = std::move(solver);
  r.iterations = iterations;
  r.min_weight = *std::min_element(r.equilibrium.begin(), r.equilibrium.end());
  r.negative_weights = r.min_weight < -1e-10;
  r.n_points = set.size();
  r.d = set.dim();
  r.alpha = ev.alpha();
  return r;
}

Eigen::MatrixXd dense_from(const KernelTable& t, const PointSet& set) {
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) G(i, j) = G(j, i) = t.at(set[static_cast<std::size_t>(i)], set[static_cast<std::size_t>(j)]);
  return G;
}

// Matrix-free G rho by cyclic convolution over a padded grid.
class FftOperator {
 public:
  FftOperator(const KernelTable& t, const PointSet& set) {
    const std::int64_t g = t.step;
    const std::size_t d = t.extent.size();
    if (d > 3) throw BudgetExceeded("FFT solver supports d <= 3; reduce the set below the dense limit");
    std::array<std::size_t, 3> dims{1, 1, 1}, ext{1, 1, 1};
    for (std::size_t i = 0; i < d; ++i) {
      ext[3 - d + i] = static_cast<std::size_t>(t.extent[i]);
      dims[3 - d + i] = detail::fft_good_size(2 * static_cast<std::size_t>(t.extent[i]) - 1);
    }
    std::vector<double> kern(dims[0] * dims[1] * dims[2], 0.0);
    auto fold = [](std::size_t j, std::size_t m, std::size_t n) -> std::ptrdiff_t {
      if (j < n) return static_cast<std::ptrdiff_t>(j);
      if (j > m - n) return static_cast<std::ptrdiff_t>(m - j);
      return -1;
    };
    for (std::size_t a = 0; a < dims[0]; ++a) {
      const auto da = fold(a, dims[0], ext[0]);
      if (da < 0) continue;
      for (std::size_t b = 0; b < dims[1]; ++b) {
        const auto db = fold(b, dims[1], ext[1]);
        if (db < 0) continue;
        for (std::size_t c = 0; c < dims[2]; ++c) {
          const auto dc = fold(c, dims[2], ext[2]);
          if (dc < 0) continue;
          const std::size_t src = (static_cast<std::size_t>(da) * ext[1] + static_cast<std::size_t>(db)) * ext[2] +
                                  static_cast<std::size_t>(dc);
          kern[(a * dims[1] + b) * dims[2] + c] = t.values[src];
        }
      }
    }
    conv_ = std::make_unique<detail::Convolver3>(dims, kern);
    const LatticePoint lo = set.lower();
    for (const auto& p : set.points()) {
      std::size_t pos[3] = {0, 0, 0};
      for (std::size_t i = 0; i < d; ++i) pos[3 - d + i] = static_cast<std::size_t>((p[i] - lo[i]) / g);
      where_.push_back((pos[0] * dims[1] + pos[1]) * dims[2] + pos[2]);
    }
    grid_.assign(dims[0] * dims[1] * dims[2], 0.0);
  }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    std::fill(grid_.begin(), grid_.end(), 0.0);
    for (std::size_t i = 0; i < where_.size(); ++i) grid_[where_[i]] = x(static_cast<Eigen::Index>(i));
    conv_->apply(grid_, out_);
    y.resize(static_cast<Eigen::Index>(where_.size()));
    for (std::size_t i = 0; i < where_.size(); ++i) y(static_cast<Eigen::Index>(i)) = out_[where_[i]];
  }

 private:
  std::unique_ptr<detail::Convolver3> conv_;
  std::vector<std::size_t> where_;
  std::vector<double> grid_, out_;
};

struct CgOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
};

CgOutcome conjugate_gradient(FftOperator& op, const Eigen::VectorXd& b, double tol, int max_iter) {
  CgOutcome o;
  o.x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b, p = b, Ap;
  double rr = r.squaredNorm();
  const double stop = tol * tol * b.squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    if (rr <= stop) {
      o.iterations = it;
      return o;
    }
    op.apply(p, Ap);
    const double alpha = rr / p.dot(Ap);
    o.x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  std::ostringstream os;
  os << "conjugate gradient did not reach relative residual " << tol << " in " << max_iter << " iterations";
  throw SolverFailure(os.str());
}

}  // namespace

Eigen::MatrixXd green_matrix(const GreenEvaluator& ev, const PointSet& set) {
  if (set.size() > 20000) throw BudgetExceeded("dense Green matrix limited to 20000 points");
  return dense_from(tabulate(ev, set), set);
}

CapacityResult equilibrium(const GreenEvaluator& ev, const PointSet& set, const CapacityOptions& opt) {
  const KernelTable t = tabulate(ev, set);
  const auto n = static_cast<Eigen::Index>(set.size());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  if (set.size() <= opt.dense_limit) {
    const Eigen::MatrixXd G = dense_from(t, set);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw SolverFailure("Green matrix is not positive definite at working precision");
    const Eigen::VectorXd rho = llt.solve(ones);
    const double res = (G * rho - ones).cwiseAbs().maxCoeff();
    return finish(ev, set, std::vector<double>(rho.data(), rho.data() + n), res, CapacityMethod::LinearSolve,
                  "dense-llt", 1);
  }
  FftOperator op(t, set);
  auto solve = [&](double tol) {
    CgOutcome o = conjugate_gradient(op, ones, tol, opt.cg_max_iterations);
    Eigen::VectorXd Gx;
    op.apply(o.x, Gx);
    const double res = (Gx - ones).cwiseAbs().maxCoeff();
    return finish(ev, set, std::vector<double>(o.x.data(), o.x.data() + n), res, CapacityMethod::LinearSolve, "fft-cg",
                  o.iterations);
  };
  CapacityResult r = solve(opt.cg_tolerance);
  if (r.negative_weights) {
    r.warnings.push_back("negative equilibrium weight " + std::to_string(r.min_weight) + "; re-solved at tighter tolerance");
    CapacityResult again = solve(std::max(opt.cg_tolerance * 1e-3, 1e-14));
    again.warnings = r.warnings;
    r = std::move(again);
  }
  return r;
}

CapacityResult capacity_variational(const GreenEvaluator& ev, const PointSet& set) {
  if (set.size() > kVariationalLimit) {
    std::ostringstream os;
    os << "variational capacity limited to " << kVariationalLimit << " points (set has " << set.size() << ")";
    throw BudgetExceeded(os.str());
  }
  const Eigen::MatrixXd G = green_matrix(ev, set);
  const auto n = G.rows();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const LpResult lp = simplex_maximize(ones, G, ones);
  const double res = (G * lp.x - ones).cwiseAbs().maxCoeff();
  return finish(ev, set, std::vector<double>(lp.x.data(), lp.x.data() + n), res, CapacityMethod::Variational,
                "simplex", lp.pivots);
}

double potential(const GreenEvaluator& ev, const PointSet& set, const std::vector<double>& rho, const LatticePoint& x) {
  if (rho.size() != set.size()) throw DomainError("weights do not match the set");
  CompensatedSum s;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const LatticePoint diff = x - set[i];
    s.add(rho[i] * ev.full_value(diff.coords));
  }
  return s.value();
}

double max_halo_potential(const GreenEvaluator& ev, const PointSet& set, const std::vector<double>& rho, double dist) {
  const int d = set.dim();
  const auto R = static_cast<std::int64_t>(std::floor(dist));
  std::set<LatticePoint> halo;
  LatticePoint lo = LatticePoint::origin(d), hi = LatticePoint::origin(d);
  for (auto& c : lo.coords) c = -R;
  for (auto& c : hi.coords) c = R;
  const double r2 = dist * dist + 1e-9;
  for (const auto& p : set.points())
    for_box(lo, hi, [&](const LatticePoint& o) {
      if (static_cast<double>(o.norm2sq()) > r2) return;
      LatticePoint y = p + o;
      if (!set.contains(y)) halo.insert(std::move(y));
    });
  double best = 0.0;
  for (const auto& y : halo) best = std::max(best, potential(ev, set, rho, y));
  return best;
}

std::vector<ScanRow> ball_capacity_scan(const GreenEvaluator& ev, const std::vector<double>& radii,
                                        const CapacityOptions& opt) {
  std::vector<ScanRow> rows;
  const int d = ev.dim();
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("ball scan radii must be positive (r = 0 is a single point)");
    const PointSet b = lattice_ball(d, r);
    const CapacityResult c = equilibrium(ev, b, opt);
    ScanRow row;
    row.parameter = r;
    row.n_points = b.size();
    row.capacity = c.capacity;
    row.normalizer = std::pow(r, d) * ev.spec()(1.0 / (r * r));
    row.ratio = row.capacity / row.normalizer;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScanRow> cylinder_capacity_scan(const GreenEvaluator& ev, const std::vector<std::int64_t>& lengths,
                                            double base, const CapacityOptions& opt) {
  std::vector<ScanRow> rows;
  for (std::int64_t L : lengths) {
    const PointSet f = lattice_cylinder(ev.dim(), L, base);
    const CapacityResult c = equilibrium(ev, f, opt);
    ScanRow row;
    row.parameter = static_cast<double>(L);
    row.n_points = f.size();
    row.capacity = c.capacity;
    row.normalizer = static_cast<double>(L);
    row.ratio = row.capacity / row.normalizer;
    if (!rows.empty() && rows.back().parameter * 2.0 == row.parameter) row.doubling = row.capacity / rows.back().capacity;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScanRow> scaling_check(const GreenEvaluator& ev, const PointSet& shape, const std::vector<int>& scales,
                                   const CapacityOptions& opt) {
  std::vector<ScanRow> rows;
  for (int s : scales) {
    const PointSet a = dilate(shape, s);
    const CapacityResult c = equilibrium(ev, a, opt);
    ScanRow row;
    row.parameter = s;
    row.n_points = a.size();
    row.capacity = c.capacity;
    row.normalizer = std::pow(static_cast<double>(s), ev.dim() - ev.alpha());
    row.ratio = row.capacity / row.normalizer;
    rows.push_back(row);
  }
  return rows;
}

double ratio_band(const std::vector<ScanRow>& rows) {
  if (rows.empty()) return 0.0;
  double lo = rows.front().ratio, hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  return hi / lo;
}

}  // namespace subwalk
