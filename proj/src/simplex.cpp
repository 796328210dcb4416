#include "subwalk/simplex.hpp"

#include "subwalk/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace subwalk {

LpResult simplex_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (c.size() != n || b.size() != m) throw DomainError("simplex: inconsistent dimensions");
  if ((b.array() < 0.0).any()) throw DomainError("simplex: needs b >= 0");

  const Eigen::Index cols = n + m + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, cols);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(cols - 1).head(m) = b;
  T.row(m).head(n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const double tol = 1e-11 * std::max(1.0, c.cwiseAbs().maxCoeff());
  const int max_pivots = static_cast<int>(50 * (n + m) + 100);
  int pivots = 0, stall = 0;
  double last_obj = 0.0;
  for (;;) {
    const bool bland = stall > 50;
    Eigen::Index enter = -1;
    double best = -tol;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < best) {
        enter = j;
        if (bland) break;
        best = T(m, j);
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= 1e-12) continue;
      const double r = T(i, cols - 1) / a;
      if (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave >= 0 &&
                                basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        ratio = r;
        leave = i;
      }
    }
    if (leave < 0) throw SolverFailure("simplex: objective unbounded");

    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    if (++pivots > max_pivots) throw SolverFailure("simplex: pivot limit reached");
    const double obj = T(m, cols - 1);
    stall = obj > last_obj + 1e-14 * std::abs(obj) ? 0 : stall + 1;
    last_obj = obj;
  }

  // re-solve the final basis: [A | I]_B x_B = b
  Eigen::MatrixXd B(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index j = basis[static_cast<std::size_t>(k)];
    if (j < n)
      B.col(k) = A.col(j);
    else
      B.col(k) = Eigen::VectorXd::Unit(m, j - n);
  }
  const Eigen::VectorXd xb = B.partialPivLu().solve(b);
  LpResult res;
  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index j = basis[static_cast<std::size_t>(k)];
    if (j < n) res.x(j) = xb(k);
  }
  res.objective = c.dot(res.x);
  res.pivots = pivots;
  return res;
}

}  // namespace subwalk
