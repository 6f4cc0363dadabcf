#include "tailbalance/tail_balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tailbalance/errors.hpp"

namespace tailbalance {

namespace {

// Symmetric uniform grid on [-1, 1]: grid_point(n - 1 - i) == -grid_point(i)
// and the midpoint of an odd grid is exactly 0.
double grid_point(int i, int n) {
  return (2.0 * i - (n - 1)) / static_cast<double>(n - 1);
}

std::string fmt_t(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

double clamp_t(double t) { return std::clamp(t, -1.0, 1.0); }

void require_boundary(const AlphaSpec& alpha, double theta, double tol) {
  const double lower = alpha(-1.0);
  if (std::abs(lower - theta) > tol) {
    throw InvalidBoundary("alpha(-1) = " + fmt_t(lower) + " does not match prior theta = " +
                          fmt_t(theta));
  }
}

template <typename Denominator>
void require_nonvanishing(const Denominator& den, int grid, double tol, const char* what) {
  for (int i = 0; i < grid; ++i) {
    const double t = grid_point(i, grid);
    if (!(std::abs(den(t)) >= tol)) {
      throw DegenerateAlpha(std::string(what) + " vanishes at t = " + fmt_t(t) +
                            " (constant alpha; request the uniform limit explicitly)");
    }
  }
}

SolvedCdf with_odds_residual(SolvedCdf::Evaluator eval, Provenance provenance,
                             const AlphaSpec& alpha, Prior prior, const Tolerances& tol) {
  const auto report = residual_check(eval, alpha, prior, tol.check_grid);
  return SolvedCdf(std::move(eval), provenance, report.max_residual, report.argmax,
                   tol.check_grid, tol.equality);
}

SolvedCdf uniform_limit(Prior prior, const Tolerances& tol) {
  return with_odds_residual([](double t) { return (clamp_t(t) + 1.0) / 2.0; },
                            Provenance::ClosedFormLinear, AlphaSpec::linear(prior, Ability(0.0)),
                            prior, tol);
}

}  // namespace

double interpolate(const std::vector<Knot>& knots, double t) {
  if (t <= knots.front().first) return knots.front().second;
  if (t >= knots.back().first) return knots.back().second;
  auto hi = std::upper_bound(knots.begin(), knots.end(), t,
                             [](double x, const Knot& k) { return x < k.first; });
  auto lo = std::prev(hi);
  const double w = (t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

AlphaSpec AlphaSpec::linear(Prior prior, Ability a) { return AlphaSpec(Linear{prior, a}); }

AlphaSpec AlphaSpec::affine(double intercept, double slope, Prior prior, const Tolerances& tol) {
  if (!(slope >= 0.0) || !std::isfinite(intercept)) {
    throw std::invalid_argument("affine alpha needs a finite intercept and a nonnegative slope");
  }
  if (std::abs(intercept - slope - prior.theta()) > tol.boundary) {
    throw InvalidBoundary("affine alpha(-1) = " + fmt_t(intercept - slope) +
                          " does not match prior theta = " + fmt_t(prior.theta()));
  }
  if (intercept + slope > 1.0 + tol.boundary) {
    throw std::invalid_argument("affine alpha(+1) = " + fmt_t(intercept + slope) + " exceeds 1");
  }
  return AlphaSpec(Affine{intercept, slope, prior});
}

AlphaSpec AlphaSpec::table(std::vector<Knot> points, std::optional<Prior> prior,
                           const Tolerances& tol) {
  if (points.size() < 2) {
    throw std::invalid_argument("alpha table needs at least two knots");
  }
  if (points.front().first != -1.0 || points.back().first != 1.0) {
    throw std::invalid_argument("alpha table must start at t = -1 and end at t = +1");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw std::invalid_argument("alpha table knots must be strictly increasing in t (knot " +
                                  std::to_string(i) + ")");
    }
    if (!(points[i].second > points[i - 1].second)) {
      throw std::invalid_argument("alpha table must be strictly increasing (knot " +
                                  std::to_string(i) + ")");
    }
  }
  if (!(points.front().second > 0.0) || points.back().second > 1.0) {
    throw std::invalid_argument("alpha table values must lie in (0, 1]");
  }
  Prior declared = prior.value_or(Prior(points.front().second));
  if (std::abs(points.front().second - declared.theta()) > tol.boundary) {
    throw InvalidBoundary("alpha table starts at " + fmt_t(points.front().second) +
                          " but prior theta = " + fmt_t(declared.theta()));
  }
  return AlphaSpec(Table{std::move(points), declared});
}

double AlphaSpec::operator()(double t) const {
  t = clamp_t(t);
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Linear>) {
          const double theta = k.prior.theta();
          return theta + (t + 1.0) * ((1.0 - theta) * k.a.value()) / 2.0;
        } else if constexpr (std::is_same_v<K, Affine>) {
          return k.intercept + k.slope * t;
        } else {
          return interpolate(k.points, t);
        }
      },
      kind_);
}

const Prior& AlphaSpec::prior() const noexcept {
  return std::visit([](const auto& k) -> const Prior& { return k.prior; }, kind_);
}

std::string_view AlphaSpec::kind_name() const noexcept {
  switch (kind_.index()) {
    case 0: return "linear";
    case 1: return "affine";
    default: return "table";
  }
}

double BetaFn::operator()(double t) const {
  const double a = alpha_(t);
  if (a >= 1.0) return std::numeric_limits<double>::infinity();
  return a / (1.0 - a);
}

CoefficientPair::Solvability CoefficientPair::solvability(int grid_size, double tol) const {
  if (grid_size < 2) throw std::invalid_argument("solvability grid needs at least 2 points");
  Solvability out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    const double t = grid_point(i, grid_size);
    const double gap = std::abs(1.0 - delta(t) * delta(-t));
    out.min_gap = std::min(out.min_gap, gap);
    if (!(gap >= tol) && !out.offending_t) {
      out.solvable = false;
      out.offending_t = t;
    }
  }
  return out;
}

CoefficientPair odds_coefficients(const AlphaSpec& alpha, Prior prior) {
  const double lambda = prior.odds();
  auto gamma = [alpha, lambda](double t) {
    const double a = alpha(t);
    return (1.0 - a) / (lambda * a);
  };
  auto delta = [gamma](double t) { return -gamma(t); };
  return CoefficientPair{gamma, delta};
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::ClosedFormLinear: return "closed_form_linear";
    case Provenance::BalancedFormula: return "balanced_formula";
    case Provenance::OddsFormula: return "odds_formula";
    case Provenance::AffinePair: return "affine_pair";
    case Provenance::Decomposition: return "decomposition";
    case Provenance::GridNumeric: return "grid_numeric";
  }
  return "unknown";
}

SolvedCdf::SolvedCdf(Evaluator evaluator, Provenance provenance, double max_residual,
                     double residual_at, int check_grid, double tol)
    : evaluator_(std::move(evaluator)),
      provenance_(provenance),
      max_residual_(max_residual),
      residual_at_(residual_at),
      valid_(true) {
  if (check_grid < 2) throw std::invalid_argument("check grid needs at least 2 points");
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < check_grid; ++i) {
    const double h = evaluator_(grid_point(i, check_grid));
    if (!std::isfinite(h) || h < prev - tol) {
      valid_ = false;
      break;
    }
    prev = h;
  }
  valid_ = valid_ && std::abs(evaluator_(-1.0)) <= tol && std::abs(evaluator_(1.0) - 1.0) <= tol;
}

SolvedCdf solve_balanced(const AlphaSpec& alpha, DegeneratePolicy policy, const Tolerances& tol) {
  require_boundary(alpha, 0.5, tol.boundary);
  const Prior prior = Prior::balanced();
  auto den = [&alpha](double t) { return (alpha(t) - 0.5) + (alpha(-t) - 0.5); };
  try {
    require_nonvanishing(den, tol.check_grid, tol.equality, "alpha(t) + alpha(-t) - 1");
  } catch (const DegenerateAlpha&) {
    if (policy == DegeneratePolicy::UniformLimit) return uniform_limit(prior, tol);
    throw;
  }
  // alpha-form: finite at t = +1 even when alpha(1) = 1.
  auto eval = [alpha](double t) {
    t = clamp_t(t);
    const double up = alpha(t);
    const double down = alpha(-t);
    // (up - 1/2) + (down - 1/2) keeps the denominator free of cancellation.
    return (2.0 * up - 1.0) * (1.0 - down) / ((up - 0.5) + (down - 0.5));
  };
  return with_odds_residual(eval, Provenance::BalancedFormula, alpha, prior, tol);
}

SolvedCdf closed_form_linear(Ability a, const Tolerances& tol) {
  const double x = a.value();
  auto eval = [x](double t) {
    t = clamp_t(t);
    return (t + 1.0) * (x * t - x + 2.0) / 4.0;
  };
  const Prior prior = Prior::balanced();
  return with_odds_residual(eval, Provenance::ClosedFormLinear, AlphaSpec::linear(prior, a), prior,
                            tol);
}

SolvedCdf solve_affine_pair(const CoefficientPair& coeffs, const Tolerances& tol) {
  const auto check = coeffs.solvability(tol.check_grid, tol.equality);
  if (!check.solvable) {
    throw SingularCoefficients(
        "delta(t) delta(-t) = 1 at t = " + fmt_t(*check.offending_t) + "; equation not solvable",
        *check.offending_t);
  }
  auto eval = [coeffs](double t) {
    t = clamp_t(t);
    const double dp = coeffs.delta(t);
    const double dm = coeffs.delta(-t);
    return (coeffs.gamma(t) * dm + coeffs.gamma(-t)) / (1.0 - dp * dm);
  };
  double worst = 0.0;
  double worst_t = -1.0;
  for (int i = 0; i < tol.check_grid; ++i) {
    const double t = grid_point(i, tol.check_grid);
    const double r = std::abs(eval(-t) - coeffs.gamma(t) - coeffs.delta(t) * eval(t));
    if (!(r <= worst)) {
      worst = r;
      worst_t = t;
    }
  }
  return SolvedCdf(eval, Provenance::AffinePair, worst, worst_t, tol.check_grid, tol.equality);
}

SolvedCdf solve_odds(const AlphaSpec& alpha, Prior prior, DegeneratePolicy policy,
                     const Tolerances& tol) {
  require_boundary(alpha, prior.theta(), tol.boundary);
  const double lambda = prior.odds();
  const double lambda_sq_m1 = lambda * lambda - 1.0;
  auto den = [&alpha, lambda_sq_m1](double t) {
    const double up = alpha(t);
    const double down = alpha(-t);
    return up + down + lambda_sq_m1 * up * down - 1.0;
  };
  try {
    require_nonvanishing(den, tol.check_grid, tol.equality,
                         "alpha(t) + alpha(-t) + (lambda^2 - 1) alpha(t) alpha(-t) - 1");
  } catch (const DegenerateAlpha&) {
    if (policy == DegeneratePolicy::UniformLimit) return uniform_limit(prior, tol);
    throw;
  }
  auto eval = [alpha, lambda, lambda_sq_m1](double t) {
    t = clamp_t(t);
    const double up = alpha(t);
    const double down = alpha(-t);
    return ((lambda + 1.0) * up - 1.0) * (1.0 - down) /
           (up + down + lambda_sq_m1 * up * down - 1.0);
  };
  return with_odds_residual(eval, Provenance::OddsFormula, alpha, prior, tol);
}

SolvedCdf closed_form_linear_odds(Ability a, Prior prior, DegeneratePolicy policy,
                                  const Tolerances& tol) {
  const double x = a.value();
  if (x == 0.0) {
    if (policy == DegeneratePolicy::UniformLimit) return uniform_limit(prior, tol);
    throw DegenerateAbility("linear-odds closed form is 0/0 at ability 0");
  }
  const double lambda = prior.odds();
  // D(t) = -a^2/4 + a^2 t^2/4 + a + lambda a^2/4 - lambda a^2 t^2/4
  //      = a + (lambda - 1)(a^2/4)(1 - t)(1 + t)
  auto eval = [x, lambda](double t) {
    t = clamp_t(t);
    const double quarter_sq = x * x / 4.0;
    const double den = x + (lambda - 1.0) * quarter_sq * ((1.0 - t) * (1.0 + t));
    return (1.0 + t) * (x * t - x + 2.0) * (x / 4.0) / den;
  };
  return with_odds_residual(eval, Provenance::ClosedFormLinear, AlphaSpec::linear(prior, a), prior,
                            tol);
}

double linear_odds_small_lambda_limit(Ability a, double t) {
  const double x = a.value();
  return (1.0 + t) * (x * t - x + 2.0) / (4.0 - x + x * t * t);
}

double linear_odds_large_lambda_limit(Ability a, double lambda, double t) {
  const double x = a.value();
  return 2.0 / (lambda * x * (1.0 - t)) - 1.0 / lambda;
}

DecompositionParts decomposition_parts(Ability a, double t) noexcept {
  const double x = a.value();
  return {t, (2.0 - x + x * t * t) / 2.0};
}

SolvedCdf alt_decomposition_solver(Ability a, const Tolerances& tol) {
  auto eval = [a](double t) {
    const auto parts = decomposition_parts(a, clamp_t(t));
    return (parts.f + parts.g) / 2.0;
  };
  const Prior prior = Prior::balanced();
  return with_odds_residual(eval, Provenance::Decomposition, AlphaSpec::linear(prior, a), prior,
                            tol);
}

ResidualReport residual_check(const SolvedCdf& h, const AlphaSpec& alpha, Prior prior,
                              int grid_size) {
  return residual_check([&h](double t) { return h(t); }, alpha, prior, grid_size);
}

ResidualReport residual_check(const std::function<double(double)>& h, const AlphaSpec& alpha,
                              Prior prior, int grid_size) {
  if (grid_size < 3 || grid_size % 2 == 0) {
    throw std::invalid_argument("residual grid size must be odd and at least 3, got " +
                                std::to_string(grid_size));
  }
  const double lambda = prior.odds();
  ResidualReport report;
  report.rows.reserve(static_cast<std::size_t>(grid_size));
  auto record = [&report](ResidualRow row) {
    if (!(row.residual <= report.max_residual)) {
      report.max_residual = row.residual;
      report.argmax = row.t;
    }
    report.rows.push_back(row);
  };
  for (int i = 0; i + 1 < grid_size; ++i) {
    const double t = grid_point(i, grid_size);
    const double up = h(t);
    const double right_tail = 1.0 - up;
    const double den = right_tail + lambda * h(-t);
    const double lhs = den == 0.0 ? 1.0 : right_tail / den;
    const double target = alpha(t);
    record({t, up, target, std::abs(lhs - target)});
  }
  const double top = h(1.0);
  record({1.0, top, alpha(1.0), std::max(std::abs(1.0 - top), std::abs(h(-1.0)))});
  return report;
}

double posterior_tail(const SolvedCdf& h, double t, Prior prior) {
  if (t >= 1.0) return 1.0;
  const double right_tail = 1.0 - h(t);
  const double den = right_tail + prior.odds() * h(-t);
  if (!(den > 0.0)) return 1.0;
  return std::clamp(right_tail / den, 0.0, 1.0);
}

SolvedCdf tabulated_cdf(std::vector<Knot> points, const AlphaSpec& alpha, Prior prior,
                        const Tolerances& tol) {
  if (points.size() < 2) throw std::invalid_argument("tabulated H needs at least two knots");
  if (points.front().first != -1.0 || points.back().first != 1.0) {
    throw std::invalid_argument("tabulated H must span t = -1 to t = +1");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw std::invalid_argument("tabulated H knots must be strictly increasing in t");
    }
  }
  auto eval = [knots = std::move(points)](double t) { return interpolate(knots, t); };
  return with_odds_residual(eval, Provenance::GridNumeric, alpha, prior, tol);
}

AlphaSpec tabulate_posterior_tail(const SolvedCdf& h, Prior prior, int knots) {
  if (knots < 3) throw std::invalid_argument("posterior-tail table needs at least 3 knots");
  std::vector<Knot> points;
  points.reserve(static_cast<std::size_t>(knots));
  for (int i = 0; i + 1 < knots; ++i) {
    const double t = grid_point(i, knots);
    points.emplace_back(t, posterior_tail(h, t, prior));
  }
  const double last = points.back().second;
  const double before = points[points.size() - 2].second;
  points.emplace_back(1.0, std::min(1.0, 2.0 * last - before));
  return AlphaSpec::table(std::move(points), prior);
}

}  // namespace tailbalance
