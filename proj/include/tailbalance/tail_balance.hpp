#pragma once

// Solvers for the tail-balance functional equation
//
//     (1 - H(t)) / (1 - H(t) + lambda H(-t)) = alpha(t),   t in [-1, +1),
//
// with the left-hand side read as 1 at t = +1. lambda = 1 is the balanced case.
// Every solver returns a SolvedCdf whose residual against its defining equation
// and whose CDF validity are recomputed on a check grid, never assumed.

#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tailbalance/signal_model.hpp"

namespace tailbalance {

struct Tolerances {
  double equality = 1e-12;  // pointwise agreement, vanishing denominators
  double residual = 1e-10;  // acceptable functional-equation residual
  double boundary = 1e-9;   // alpha(-1) versus the declared prior
  int check_grid = 1001;    // points used for residual / validity checks
};

// (t, value) knot of a piecewise-linear table on [-1, +1].
using Knot = std::pair<double, double>;

// Piecewise-linear interpolation on strictly increasing knots.
double interpolate(const std::vector<Knot>& knots, double t);

// Target function alpha(t) of the tail-balance equation.
class AlphaSpec {
 public:
  // alpha(t) = theta + (t + 1)(1 - theta) a / 2.
  struct Linear {
    Prior prior;
    Ability a;
  };
  // alpha(t) = intercept + slope * t.
  struct Affine {
    double intercept;
    double slope;
    Prior prior;
  };
  // Monotone piecewise-linear through knots spanning [-1, +1].
  struct Table {
    std::vector<Knot> points;
    Prior prior;
  };

  static AlphaSpec linear(Prior prior, Ability a);
  static AlphaSpec affine(double intercept, double slope, Prior prior, const Tolerances& tol = {});
  // Without a declared prior, theta is read off the first knot.
  static AlphaSpec table(std::vector<Knot> points, std::optional<Prior> prior = std::nullopt,
                         const Tolerances& tol = {});

  double operator()(double t) const;
  const Prior& prior() const noexcept;
  std::string_view kind_name() const noexcept;
  const std::variant<Linear, Affine, Table>& kind() const noexcept { return kind_; }

 private:
  explicit AlphaSpec(std::variant<Linear, Affine, Table> kind) : kind_(std::move(kind)) {}
  std::variant<Linear, Affine, Table> kind_;
};

// Odds transform beta(t) = alpha(t) / (1 - alpha(t)); +inf where alpha = 1.
class BetaFn {
 public:
  explicit BetaFn(AlphaSpec alpha) : alpha_(std::move(alpha)) {}
  double operator()(double t) const;

 private:
  AlphaSpec alpha_;
};

// Coefficients of H(-t) = gamma(t) + delta(t) H(t).
struct CoefficientPair {
  std::function<double(double)> gamma;
  std::function<double(double)> delta;

  struct Solvability {
    bool solvable = true;
    std::optional<double> offending_t;  // first grid point with delta(t) delta(-t) ~ 1
    double min_gap = 0.0;               // min |1 - delta(t) delta(-t)| over the grid
  };
  Solvability solvability(int grid_size, double tol = 1e-12) const;
};

// Coefficients that turn the odds equation into the affine-pair form:
// gamma(t) = (1 - alpha(t)) / (lambda alpha(t)), delta = -gamma.
CoefficientPair odds_coefficients(const AlphaSpec& alpha, Prior prior);

enum class Provenance {
  ClosedFormLinear,
  BalancedFormula,
  OddsFormula,
  AffinePair,
  Decomposition,
  GridNumeric,
};

std::string_view to_string(Provenance p) noexcept;

class SolvedCdf {
 public:
  using Evaluator = std::function<double(double)>;

  SolvedCdf(Evaluator evaluator, Provenance provenance, double max_residual, double residual_at,
            int check_grid = 1001, double tol = 1e-12);

  double operator()(double t) const { return evaluator_(t); }
  Provenance provenance() const noexcept { return provenance_; }
  double max_residual() const noexcept { return max_residual_; }
  double residual_at() const noexcept { return residual_at_; }
  bool is_valid_cdf() const noexcept { return valid_; }

 private:
  Evaluator evaluator_;
  Provenance provenance_;
  double max_residual_;
  double residual_at_;
  bool valid_;
};

// Whether a degenerate (0/0) input is rejected or answered with the uniform limit.
enum class DegeneratePolicy { Reject, UniformLimit };

// Balanced case: H(t) = (2 alpha(t) - 1)(1 - alpha(-t)) / (alpha(t) + alpha(-t) - 1).
SolvedCdf solve_balanced(const AlphaSpec& alpha, DegeneratePolicy policy = DegeneratePolicy::Reject,
                         const Tolerances& tol = {});

// H(t) = (t + 1)(a t - a + 2) / 4.
SolvedCdf closed_form_linear(Ability a, const Tolerances& tol = {});

// H(t) = (gamma(t) delta(-t) + gamma(-t)) / (1 - delta(t) delta(-t)).
SolvedCdf solve_affine_pair(const CoefficientPair& coeffs, const Tolerances& tol = {});

// General odds lambda, alpha(-1) = theta.
SolvedCdf solve_odds(const AlphaSpec& alpha, Prior prior,
                     DegeneratePolicy policy = DegeneratePolicy::Reject, const Tolerances& tol = {});

// Closed form for alpha(t) = theta + (t + 1)(1 - theta) a / 2 at general odds.
SolvedCdf closed_form_linear_odds(Ability a, Prior prior,
                                  DegeneratePolicy policy = DegeneratePolicy::Reject,
                                  const Tolerances& tol = {});

// Asymptotic rows of the linear-odds closed form. These are not CDFs.
double linear_odds_small_lambda_limit(Ability a, double t);                // lambda -> 0
double linear_odds_large_lambda_limit(Ability a, double lambda, double t);  // lambda -> inf

// Odd and even parts of the linear-case solution: f = H(t) - H(-t), g = H(t) + H(-t).
struct DecompositionParts {
  double f;
  double g;
};
DecompositionParts decomposition_parts(Ability a, double t) noexcept;

// H = (f + g) / 2 from the odd/even decomposition.
SolvedCdf alt_decomposition_solver(Ability a, const Tolerances& tol = {});

struct ResidualRow {
  double t;
  double h;
  double alpha;
  double residual;
};

struct ResidualReport {
  double max_residual = 0.0;
  double argmax = -1.0;
  std::vector<ResidualRow> rows;
};

// |(1 - H(t)) / (1 - H(t) + lambda H(-t)) - alpha(t)| on grid_size uniform points
// over [-1, +1]. The last point, t = +1, carries the boundary convention: its
// residual is max(|1 - H(1)|, |H(-1)|), i.e. both tails must vanish there.
// grid_size must be odd and >= 3.
ResidualReport residual_check(const SolvedCdf& h, const AlphaSpec& alpha, Prior prior,
                              int grid_size);
ResidualReport residual_check(const std::function<double(double)>& h, const AlphaSpec& alpha,
                              Prior prior, int grid_size);

// P(A | S >= t) = (1 - H(t)) / (1 - H(t) + lambda H(-t)); 1 at t = +1 or when
// both tails vanish.
double posterior_tail(const SolvedCdf& h, double t, Prior prior);

// Grid-backed H from (t, H) knots, with its residual taken against alpha.
SolvedCdf tabulated_cdf(std::vector<Knot> points, const AlphaSpec& alpha, Prior prior,
                        const Tolerances& tol = {});

// Tabulate posterior_tail of h on `knots` uniform points. At t = +1, where the
// ratio is 0/0, the value is extrapolated linearly from the two previous knots.
AlphaSpec tabulate_posterior_tail(const SolvedCdf& h, Prior prior, int knots);

}  // namespace tailbalance
