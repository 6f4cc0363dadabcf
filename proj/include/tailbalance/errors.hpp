#pragma once

#include <stdexcept>
#include <string>

namespace tailbalance {

// Numerical degeneracies raised by solvers. The CLI maps these to exit code 2;
// plain std::invalid_argument (bad inputs) maps to exit code 1.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// alpha(t) + alpha(-t) - 1 (or the odds-form denominator) vanished on the grid.
class DegenerateAlpha : public SolverError {
 public:
  using SolverError::SolverError;
};

// Zero ability in the linear-odds closed form (0/0 everywhere).
class DegenerateAbility : public SolverError {
 public:
  using SolverError::SolverError;
};

// |1 - delta(t) delta(-t)| fell below tolerance at grid point `at()`.
class SingularCoefficients : public SolverError {
 public:
  SingularCoefficients(const std::string& what, double t) : SolverError(what), t_(t) {}
  double at() const noexcept { return t_; }

 private:
  double t_;
};

// A juror with a = 0 has no informative signal threshold.
class ZeroAbility : public SolverError {
 public:
  using SolverError::SolverError;
};

// alpha(-1) does not match the declared prior.
class InvalidBoundary : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EvenJury : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration guard (exact recursion, permutation scans).
class SizeLimit : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tailbalance
