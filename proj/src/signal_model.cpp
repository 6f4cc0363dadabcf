#include "tailbalance/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tailbalance {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double clamp_signal(double t) { return std::clamp(t, -1.0, 1.0); }

// F_a(t) with t already known to lie in [-1, 1].
double cdf_a(double a, double t) { return (t + 1.0) * (a * t - a + 2.0) / 4.0; }

}  // namespace

Ability::Ability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("ability must lie in [0, 1], got " + std::to_string(value));
  }
}

std::string_view to_string(State s) noexcept { return s == State::A ? "A" : "B"; }

Prior::Prior(double theta) : theta_(theta), odds_((1.0 - theta) / theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::invalid_argument("prior theta must lie in (0, 1), got " + std::to_string(theta));
  }
}

Prior Prior::from_odds(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("prior odds must be positive and finite, got " +
                                std::to_string(lambda));
  }
  return Prior(1.0 / (1.0 + lambda), lambda);
}

Signal::Signal(double value) : value_(value) {
  if (!(value >= -1.0 && value <= 1.0)) {
    throw std::invalid_argument("signal must lie in [-1, 1], got " + std::to_string(value));
  }
}

double cdf_given_A(Ability a, Signal t) noexcept { return cdf_a(a.value(), t.value()); }

double cdf_given_B(Ability a, Signal t) noexcept {
  const double x = a.value();
  const double s = t.value();
  return (s + 1.0) * (x - x * s + 2.0) / 4.0;
}

double cdf_given_state(Ability a, Signal t, State state) noexcept {
  return state == State::A ? cdf_given_A(a, t) : cdf_given_B(a, t);
}

double pdf_given_state(Ability a, Signal s, State state) noexcept {
  const double slope = state == State::A ? a.value() : -a.value();
  return (1.0 + slope * s.value()) / 2.0;
}

Signal quantile_given_state(Ability a, double u, State state) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::invalid_argument("quantile level must lie in [0, 1], got " + std::to_string(u));
  }
  // G_a^{-1}(u) = -F_a^{-1}(1 - u)
  if (state == State::B) {
    return Signal(-quantile_given_state(a, 1.0 - u, State::A).value());
  }
  if (u == 0.0) return Signal(-1.0);
  if (u == 1.0) return Signal(1.0);
  const double x = a.value();
  if (x == 0.0) {
    return Signal(clamp_signal(2.0 * u - 1.0));
  }
  // Root of x t^2 + 2 t + c = 0 in rationalized form, c = 2 - x - 4u.
  const double c = 2.0 - x - 4.0 * u;
  const double disc = std::max(0.0, 1.0 - x * c);
  return Signal(clamp_signal(-c / (1.0 + std::sqrt(disc))));
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

double RngStream::uniform() { return unit_(engine_); }

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

Signal sample_signal(Ability a, State state, RngStream& rng) {
  return quantile_given_state(a, rng.uniform(), state);
}

double posterior_from_signal(Ability a, Signal s, Prior prior) noexcept {
  const double like_a = prior.theta() * (1.0 + a.value() * s.value());
  const double like_b = (1.0 - prior.theta()) * (1.0 - a.value() * s.value());
  return std::clamp(like_a / (like_a + like_b), 0.0, 1.0);
}

}  // namespace tailbalance
