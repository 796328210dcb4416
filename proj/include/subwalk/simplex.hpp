#pragma once

#include <Eigen/Dense>

namespace subwalk {

struct LpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

/// max c.x subject to A x <= b, x >= 0, with b >= 0 (the origin is feasible).
/// Dense tableau simplex with Bland's rule as an anti-cycling fallback; the
/// final basis is re-solved directly for accuracy. Throws SolverFailure when
/// unbounded or out of pivots.
LpResult simplex_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace subwalk
