#pragma once

#include <stdexcept>
#include <string>

namespace subwalk {

// Invalid parameters: alpha outside its range, recurrent regime, bad lattice
// coordinates. The CLI maps this family to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Coefficients of 1 - psi(1 - s) came out negative: the family is not a
// Bernstein function (or not one usable for subordination).
class NotBernsteinError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A memory, point-count or step budget would be exceeded. Exit code 3.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver or quadrature refinement failed to converge. Exit code 4.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subwalk
