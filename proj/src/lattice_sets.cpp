#include "subwalk/lattice_sets.hpp"

#include "subwalk/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace subwalk {

ThornProfile ThornProfile::linear(double delta) {
  if (!(delta > 0.0)) throw DomainError("linear thorn needs delta > 0");
  return {Linear{delta}};
}

ThornProfile ThornProfile::power(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("power thorn needs 0 < gamma < 1");
  return {Power{gamma}};
}

ThornProfile ThornProfile::lin_over_log(double beta) {
  if (!(beta > 0.0)) throw DomainError("n/log(1+n)^beta thorn needs beta > 0");
  return {LinOverLog{beta}};
}

ThornProfile ThornProfile::table(std::vector<double> values) {
  if (values.empty()) throw DomainError("thorn table is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw DomainError("thorn table values must be positive");
    if (i && values[i] < values[i - 1]) throw DomainError("thorn table must be nondecreasing");
  }
  return {Table{std::move(values)}};
}

double ThornProfile::operator()(double n) const {
  return std::visit(
      [n](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return s.delta * n;
        } else if constexpr (std::is_same_v<T, Power>) {
          return std::pow(n, s.gamma);
        } else if constexpr (std::is_same_v<T, LinOverLog>) {
          return n / std::pow(std::log1p(n), s.beta);
        } else {
          const auto i = static_cast<std::size_t>(std::max(1.0, std::floor(n)));
          return s.values[std::min(i, s.values.size()) - 1];
        }
      },
      shape);
}

std::string ThornProfile::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Linear>)
          os << "linear(" << s.delta << ")";
        else if constexpr (std::is_same_v<T, Power>)
          os << "power(" << s.gamma << ")";
        else if constexpr (std::is_same_v<T, LinOverLog>)
          os << "linoverlog(" << s.beta << ")";
        else
          os << "table(" << s.values.size() << ")";
      },
      shape);
  return os.str();
}

namespace {

void need_dim(int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
}

// Radius of the cross-section at height xd for the sets of the form
// {|x'| <= rho(x_d)}; negative when the level is empty.
double cross_radius(const LatticeSetSpec& s, std::int64_t xd) {
  if (xd < 1) return -1.0;
  const double h = static_cast<double>(xd);
  if (auto* c = std::get_if<LatticeSetSpec::Cylinder>(&s.kind)) return xd <= c->length ? c->base : -1.0;
  if (auto* c = std::get_if<LatticeSetSpec::Cone>(&s.kind)) return c->slope * h;
  if (auto* t = std::get_if<LatticeSetSpec::Thorn>(&s.kind)) return t->profile(h);
  return -1.0;
}

bool within(double r2, double rho) { return rho >= 0.0 && r2 <= rho * rho * (1.0 + 1e-12) + 1e-9; }

bool is_vertical(const LatticeSetSpec& s) {
  return std::holds_alternative<LatticeSetSpec::Cylinder>(s.kind) ||
         std::holds_alternative<LatticeSetSpec::Cone>(s.kind) || std::holds_alternative<LatticeSetSpec::Thorn>(s.kind);
}

}  // namespace

LatticeSetSpec LatticeSetSpec::axis(int d) {
  need_dim(d);
  return {d, Axis{}};
}

LatticeSetSpec LatticeSetSpec::hyperplane(int d, int coordinate) {
  need_dim(d);
  if (coordinate < 0 || coordinate >= d) throw DomainError("hyperplane coordinate out of range");
  return {d, Hyperplane{coordinate}};
}

LatticeSetSpec LatticeSetSpec::ball(int d, double r) {
  need_dim(d);
  if (!(r >= 0.0)) throw DomainError("ball radius must be >= 0");
  return {d, Ball{r}};
}

LatticeSetSpec LatticeSetSpec::cylinder(int d, std::int64_t length, double base) {
  if (d < 2) throw DomainError("cylinder needs d >= 2");
  if (length < 1 || !(base >= 0.0)) throw DomainError("cylinder needs L >= 1 and base >= 0");
  return {d, Cylinder{length, base}};
}

LatticeSetSpec LatticeSetSpec::cone(int d, double slope) {
  if (d < 2) throw DomainError("cone needs d >= 2");
  if (!(slope > 0.0)) throw DomainError("cone slope must be > 0");
  return {d, Cone{slope}};
}

LatticeSetSpec LatticeSetSpec::thorn(int d, ThornProfile profile) {
  if (d < 2) throw DomainError("thorn needs d >= 2");
  return {d, Thorn{std::move(profile)}};
}

LatticeSetSpec LatticeSetSpec::explicit_set(PointSet points) {
  if (points.empty()) throw DomainError("explicit set is empty");
  const int d = points.dim();
  return {d, Explicit{std::move(points)}};
}

bool LatticeSetSpec::contains(const LatticePoint& x) const { return contains(std::span<const std::int64_t>(x.coords)); }

bool LatticeSetSpec::contains(std::span<const std::int64_t> x) const {
  if (static_cast<int>(x.size()) != d) throw DomainError("point has the wrong dimension");
  if (std::holds_alternative<Axis>(kind)) {
    if (x[0] < 1) return false;
    for (std::size_t i = 1; i < x.size(); ++i)
      if (x[i] != 0) return false;
    return true;
  }
  if (auto* h = std::get_if<Hyperplane>(&kind)) return x[static_cast<std::size_t>(h->coordinate)] == 0;
  if (auto* b = std::get_if<Ball>(&kind)) {
    double s = 0.0;
    for (auto v : x) s += static_cast<double>(v) * static_cast<double>(v);
    return within(s, b->radius);
  }
  if (auto* e = std::get_if<Explicit>(&kind)) return e->points.contains(LatticePoint(std::vector<std::int64_t>(x.begin(), x.end())));
  const double rho = cross_radius(*this, x.back());
  if (rho < 0.0) return false;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += static_cast<double>(x[i]) * static_cast<double>(x[i]);
  return within(s, rho);
}

bool LatticeSetSpec::is_finite() const {
  return std::holds_alternative<Ball>(kind) || std::holds_alternative<Cylinder>(kind) ||
         std::holds_alternative<Explicit>(kind);
}

std::string LatticeSetSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Axis>)
          os << "axis";
        else if constexpr (std::is_same_v<T, Hyperplane>)
          os << "hyperplane:" << s.coordinate;
        else if constexpr (std::is_same_v<T, Ball>)
          os << "ball:" << s.radius;
        else if constexpr (std::is_same_v<T, Cylinder>)
          os << "cylinder:" << s.length << ":" << s.base;
        else if constexpr (std::is_same_v<T, Cone>)
          os << "cone:" << s.slope;
        else if constexpr (std::is_same_v<T, Thorn>)
          os << "thorn:" << s.profile.describe();
        else
          os << "explicit(" << s.points.size() << " points)";
      },
      kind);
  return os.str();
}

LatticePoint LatticeSetSpec::start_at_distance(std::int64_t r) const {
  if (r < 1) throw DomainError("start distance must be >= 1");
  LatticePoint x = LatticePoint::origin(d);
  if (std::holds_alternative<Axis>(kind)) {
    if (d < 2) throw DomainError("axis start needs d >= 2");
    x[1] = r;
  } else if (auto* h = std::get_if<Hyperplane>(&kind)) {
    x[static_cast<std::size_t>(h->coordinate)] = r;
  } else if (auto* b = std::get_if<Ball>(&kind)) {
    x[0] = static_cast<std::int64_t>(std::floor(b->radius)) + r;
  } else if (auto* e = std::get_if<Explicit>(&kind)) {
    x = e->points.upper();
    x[0] += r;
  } else {
    x[static_cast<std::size_t>(d - 1)] = 1 - r;
  }
  return x;
}

LatticeSetSpec parse_set(const std::string& text, int d) {
  std::vector<std::string> tok;
  std::stringstream ss(text);
  std::string t;
  while (std::getline(ss, t, ':')) tok.push_back(t);
  if (tok.empty()) throw DomainError("empty set description");
  auto num = [&](std::size_t i) {
    if (i >= tok.size()) throw DomainError("set '" + text + "' is missing a parameter");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok[i].size() || tok[i].empty()) throw DomainError("bad number '" + tok[i] + "' in set '" + text + "'");
    return v;
  };
  auto arity = [&](std::size_t n) {
    if (tok.size() != n) throw DomainError("set '" + text + "' has the wrong number of parameters");
  };
  const std::string& k = tok[0];
  if (k == "axis") {
    arity(1);
    return LatticeSetSpec::axis(d);
  }
  if (k == "hyperplane") {
    if (tok.size() == 1) return LatticeSetSpec::hyperplane(d, 0);
    arity(2);
    return LatticeSetSpec::hyperplane(d, static_cast<int>(num(1)));
  }
  if (k == "ball") {
    arity(2);
    return LatticeSetSpec::ball(d, num(1));
  }
  if (k == "cylinder") {
    arity(3);
    return LatticeSetSpec::cylinder(d, static_cast<std::int64_t>(num(1)), num(2));
  }
  if (k == "cone") {
    arity(2);
    return LatticeSetSpec::cone(d, num(1));
  }
  if (k == "thorn") {
    arity(3);
    const std::string& p = tok[1];
    if (p == "linear") return LatticeSetSpec::thorn(d, ThornProfile::linear(num(2)));
    if (p == "power") return LatticeSetSpec::thorn(d, ThornProfile::power(num(2)));
    if (p == "linoverlog") return LatticeSetSpec::thorn(d, ThornProfile::lin_over_log(num(2)));
    throw DomainError("unknown thorn profile '" + p + "'");
  }
  if (k == "points") {
    arity(2);
    std::vector<LatticePoint> pts;
    std::stringstream ps(tok[1]);
    std::string one;
    while (std::getline(ps, one, ';'))
      if (!one.empty()) pts.push_back(parse_point(one));
    PointSet set(d, std::move(pts));
    return LatticeSetSpec::explicit_set(std::move(set));
  }
  if (k == "file") {
    if (tok.size() < 2) throw DomainError("file set needs a path");
    std::string path = text.substr(5);
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open point set file '" + path + "'");
    PointSet set = PointSet::read(in);
    if (set.dim() != d) throw DomainError("point set file has dimension " + std::to_string(set.dim()));
    return LatticeSetSpec::explicit_set(std::move(set));
  }
  throw DomainError("unknown set '" + text + "'");
}

namespace {

constexpr double kShellWorkLimit = 2e9;

// Calls f on each member of B_k lying on (stride Z)^d.
void visit_shell(const LatticeSetSpec& s, int k, std::int64_t stride, const std::function<void(const LatticePoint&)>& f) {
  if (k < 0) throw DomainError("shell index must be >= 0");
  if (k > 40) throw BudgetExceeded("shell index too large");
  const std::int64_t lo2 = std::int64_t{1} << (2 * k);
  const std::int64_t hi2 = std::int64_t{1} << (2 * k + 2);
  const std::int64_t M = (std::int64_t{1} << (k + 1)) - 1;
  const int d = s.d;
  auto first_multiple = [stride](std::int64_t a) {  // smallest multiple of stride >= a
    std::int64_t q = a >= 0 ? (a + stride - 1) / stride : -((-a) / stride);
    return q * stride;
  };
  LatticePoint x = LatticePoint::origin(d);

  // refuse enumerations that could not finish
  double work = 0.0;
  const double side = 2.0 * static_cast<double>(M) / static_cast<double>(stride) + 1.0;
  if (std::holds_alternative<LatticeSetSpec::Hyperplane>(s.kind)) {
    work = std::pow(side, d - 1);
  } else if (auto* b = std::get_if<LatticeSetSpec::Ball>(&s.kind)) {
    work = std::pow(2.0 * std::min(b->radius, static_cast<double>(M)) / static_cast<double>(stride) + 1.0, d);
  } else if (is_vertical(s)) {
    const double rho = std::min(cross_radius(s, M) < 0.0 ? 0.0 : cross_radius(s, M), static_cast<double>(M));
    work = static_cast<double>(M) / static_cast<double>(stride) *
           std::pow(2.0 * rho / static_cast<double>(stride) + 1.0, d - 1);
  }
  if (work > kShellWorkLimit) {
    std::ostringstream os;
    os << "shell " << k << " of " << s.describe() << " would scan about " << work << " candidate points";
    throw BudgetExceeded(os.str());
  }

  if (std::holds_alternative<LatticeSetSpec::Axis>(s.kind)) {
    for (std::int64_t n = first_multiple(std::int64_t{1} << k); n <= M; n += stride) {
      x[0] = n;
      f(x);
    }
    return;
  }
  if (auto* e = std::get_if<LatticeSetSpec::Explicit>(&s.kind)) {
    for (const auto& p : e->points.points()) {
      const auto r2 = p.norm2sq();
      if (r2 < lo2 || r2 >= hi2) continue;
      bool on = true;
      for (auto c : p.coords) on = on && c % stride == 0;
      if (on) f(p);
    }
    return;
  }

  // free coordinates enumerated recursively with pruning on the partial norm
  std::vector<int> free;
  std::int64_t bound = M;
  double cap2 = -1.0;  // extra constraint on the free part, |x_free|^2 <= cap2
  if (auto* h = std::get_if<LatticeSetSpec::Hyperplane>(&s.kind)) {
    for (int i = 0; i < d; ++i)
      if (i != h->coordinate) free.push_back(i);
  } else if (auto* b = std::get_if<LatticeSetSpec::Ball>(&s.kind)) {
    for (int i = 0; i < d; ++i) free.push_back(i);
    bound = std::min<std::int64_t>(M, static_cast<std::int64_t>(std::floor(b->radius)));
    cap2 = b->radius * b->radius;
  }

  std::function<void(std::size_t, std::int64_t, std::int64_t, std::int64_t, double)> rec =
      [&](std::size_t j, std::int64_t sum2, std::int64_t lim, std::int64_t fixed2, double rho) {
        if (j == free.size()) {
          const std::int64_t t = sum2 + fixed2;
          if (t < lo2 || t >= hi2) return;
          if (rho >= 0.0 && !within(static_cast<double>(sum2), rho)) return;
          f(x);
          return;
        }
        const auto i = static_cast<std::size_t>(free[j]);
        for (std::int64_t v = first_multiple(-lim); v <= lim; v += stride) {
          const std::int64_t s2 = sum2 + v * v;
          if (s2 + fixed2 >= hi2) continue;
          x[i] = v;
          rec(j + 1, s2, lim, fixed2, rho);
        }
        x[i] = 0;
      };

  if (!free.empty()) {
    rec(0, 0, bound, 0, cap2 >= 0.0 ? std::sqrt(cap2) : -1.0);
    return;
  }
  if (!is_vertical(s)) throw DomainError("unsupported set kind");
  for (int i = 0; i + 1 < d; ++i) free.push_back(i);
  const auto last = static_cast<std::size_t>(d - 1);
  for (std::int64_t h = first_multiple(1); h <= M; h += stride) {
    const double rho = cross_radius(s, h);
    if (rho < 0.0) {
      if (std::holds_alternative<LatticeSetSpec::Cylinder>(s.kind)) break;
      continue;
    }
    const std::int64_t h2 = h * h;
    if (h2 >= hi2) break;
    const double rmax = std::min(rho, std::sqrt(static_cast<double>(hi2 - h2)));
    const auto lim = static_cast<std::int64_t>(std::floor(rmax * (1.0 + 1e-12) + 1e-9));
    x[last] = h;
    rec(0, 0, lim, h2, rho);
  }
}

}  // namespace

PointSet shell(const LatticeSetSpec& set, int k, std::size_t max_points) {
  std::vector<LatticePoint> pts;
  visit_shell(set, k, 1, [&](const LatticePoint& x) {
    if (pts.size() >= max_points) {
      std::ostringstream os;
      os << "shell " << k << " of " << set.describe() << " has more than " << max_points << " points";
      throw BudgetExceeded(os.str());
    }
    pts.push_back(x);
  });
  return PointSet(set.d, std::move(pts));
}

Shell sampled_shell(const LatticeSetSpec& set, int k, std::size_t budget) {
  Shell out;
  out.k = k;
  visit_shell(set, k, 1, [&](const LatticePoint&) { ++out.full_count; });
  if (out.full_count <= budget) {
    out.points = shell(set, k);
    return out;
  }
  for (int s = 2;; ++s) {
    std::vector<LatticePoint> pts;
    visit_shell(set, k, s, [&](const LatticePoint& x) { pts.push_back(x); });
    if (pts.size() <= budget) {
      out.stride = s;
      out.points = PointSet(set.d, std::move(pts));
      return out;
    }
  }
}

}  // namespace subwalk
