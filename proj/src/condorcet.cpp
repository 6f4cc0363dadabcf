#include "tailbalance/condorcet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tailbalance {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  const double top = *std::max_element(xs.begin(), xs.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

}  // namespace

void CondorcetModel::validate() const {
  if (!(p > 0.5 && p <= 1.0)) {
    throw std::invalid_argument("juror accuracy p must lie in (1/2, 1], got " + std::to_string(p));
  }
  if (n < 1 || n % 2 == 0) {
    throw std::invalid_argument("jury size must be odd and positive, got " + std::to_string(n));
  }
}

MajorityTail condorcet_tails(const CondorcetModel& model) {
  model.validate();
  if (model.p == 1.0) return {1.0, 0.0};
  const int n = model.n;
  const double q = 1.0 - model.p;
  // Direct summation while the smallest term p^k q^(n-k) cannot underflow.
  if (n * -std::log(std::min(model.p, q)) < 600.0) {
    double correct = 0.0;
    double incorrect = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      const double term = binom * std::pow(model.p, k) * std::pow(q, n - k);
      (2 * k > n ? correct : incorrect) += term;
      binom = binom * (n - k) / (k + 1);
    }
    // Near saturation the direct sum stalls at 1 with rounding wobble; the
    // complement of the small tail does not.
    if (incorrect < 1e-3) correct = 1.0 - incorrect;
    return {correct, incorrect};
  }
  const double log_p = std::log(model.p);
  const double log_q = std::log1p(-model.p);
  // log C(n, k) by the multiplicative recurrence C(n, k+1) = C(n, k)(n - k)/(k + 1).
  std::vector<double> upper;
  std::vector<double> lower;
  upper.reserve(static_cast<std::size_t>(n / 2 + 1));
  lower.reserve(static_cast<std::size_t>(n / 2 + 1));
  double log_binom = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double term = log_binom + k * log_p + (n - k) * log_q;
    (2 * k > n ? upper : lower).push_back(term);
    log_binom += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1));
  }
  const double log_correct = log_sum_exp(upper);
  const double log_incorrect = log_sum_exp(lower);
  // Normalize in log space against rounding in the recurrence, then take the
  // larger tail as the complement of the smaller so it stays monotone in n.
  const double log_total = std::max(log_correct, log_incorrect) +
                           std::log1p(std::exp(-std::abs(log_correct - log_incorrect)));
  const double incorrect = std::exp(log_incorrect - log_total);
  return {1.0 - incorrect, incorrect};
}

double condorcet_exact(const CondorcetModel& model) { return condorcet_tails(model).correct; }

std::vector<CurvePoint> condorcet_curve(double p, int n_max) {
  if (n_max < 1 || n_max % 2 == 0) {
    throw std::invalid_argument("n_max must be odd and positive, got " + std::to_string(n_max));
  }
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(n_max / 2 + 1));
  for (int n = 1; n <= n_max; n += 2) {
    const MajorityTail tail = condorcet_tails({p, n});
    curve.push_back({n, tail.correct, tail.incorrect});
  }
  return curve;
}

}  // namespace tailbalance
