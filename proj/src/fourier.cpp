#include "subwalk/errors.hpp"
#include "subwalk/green.hpp"
#include "subwalk/numeric.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace subwalk {

namespace {

struct Rule {
  std::vector<double> x, w;  // on [0, 1]
};

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre recurrence.
const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    r.x.push_back(0.5 * (es.eigenvalues()(i) + 1.0));
    r.w.push_back(v0 * v0);  // weights on [-1,1] are 2 v0^2; halved for [0,1]
  }
  return cache.emplace(n, std::move(r)).first->second;
}

class Integrand {
 public:
  Integrand(int d, const BernsteinSpec& spec, const LatticePoint& x) : d_(d), spec_(spec), x_(x) {}

  // Tensor Gauss-Legendre over prod [lo_i, lo_i + h].
  double box(const std::vector<double>& lo, double h, int base) const {
    std::vector<std::vector<double>> cw(static_cast<std::size_t>(d_)), s2(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
      const double xi = std::abs(static_cast<double>(x_[static_cast<std::size_t>(i)]));
      const int n = base + static_cast<int>(std::ceil(4.0 * xi * h / kPi));
      const Rule& r = gauss_legendre(n);
      for (int j = 0; j < n; ++j) {
        const double t = lo[static_cast<std::size_t>(i)] + h * r.x[static_cast<std::size_t>(j)];
        const double s = std::sin(t / 2.0);
        cw[static_cast<std::size_t>(i)].push_back(h * r.w[static_cast<std::size_t>(j)] * std::cos(t * xi));
        s2[static_cast<std::size_t>(i)].push_back(s * s);
      }
    }
    return recurse(0, 1.0, 0.0, cw, s2);
  }

 private:
  double recurse(int i, double wprod, double ssum, const std::vector<std::vector<double>>& cw,
                 const std::vector<std::vector<double>>& s2) const {
    const auto& c = cw[static_cast<std::size_t>(i)];
    const auto& s = s2[static_cast<std::size_t>(i)];
    double acc = 0.0;
    if (i + 1 == d_) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        const double lam = 2.0 * (ssum + s[j]) / d_;
        acc += wprod * c[j] / spec_(lam);
      }
      return acc;
    }
    for (std::size_t j = 0; j < c.size(); ++j) acc += recurse(i + 1, wprod * c[j], ssum + s[j], cw, s2);
    return acc;
  }

  int d_;
  const BernsteinSpec& spec_;
  const LatticePoint& x_;
};

double oracle_at_level(int d, const BernsteinSpec& spec, const LatticePoint& x, int level, double alpha) {
  const Integrand f(d, spec, x);
  const int base = 4 << level;
  // shells until the unresolved inner cube is negligible on its own
  const double gap = d - alpha;
  int shells = static_cast<int>(std::ceil(std::log2(kPi) + 12.0 * std::log2(10.0) / gap));
  shells = std::clamp(shells, 8, 200);

  CompensatedSum total;
  double last_shell = 0.0;
  for (int j = 0; j < shells; ++j) {
    const double h = kPi * std::ldexp(1.0, -j - 1);  // sub-box side
    CompensatedSum shell;
    // 2^d - 1 boxes: each coordinate in [0,h] or [h,2h], not all in [0,h]
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
      std::vector<double> lo(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) lo[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? h : 0.0;
      shell.add(f.box(lo, h, base));
    }
    last_shell = shell.value();
    total.add(last_shell);
  }
  // self-similar completion of the innermost cube
  const double rho = std::pow(2.0, alpha - d);
  total.add(last_shell * rho / (1.0 - rho));
  return total.value() * std::pow(kPi, -d);
}

}  // namespace

FourierResult fourier_oracle(int d, const BernsteinSpec& spec, const LatticePoint& x, int level, double rel_tol) {
  if (x.dim() != d) throw DomainError("dimension mismatch");
  const double alpha = spec.index().value_or(2.0);
  if (!(alpha < d)) throw DomainError("Fourier oracle needs alpha < d (integrable singularity)");
  if (level < 0) throw DomainError("quadrature level must be >= 0");
  FourierResult res;
  double prev = oracle_at_level(d, spec, x, level, alpha);
  for (int l = level + 1; l <= level + 4; ++l) {
    const double cur = oracle_at_level(d, spec, x, l, alpha);
    res.value = cur;
    res.change = std::abs(cur - prev);
    res.level = l;
    if (res.change <= rel_tol * std::abs(cur)) return res;
    prev = cur;
  }
  std::ostringstream os;
  os << "Fourier quadrature did not stabilise: last change " << res.change << " at level " << res.level;
  throw SolverFailure(os.str());
}

}  // namespace subwalk
