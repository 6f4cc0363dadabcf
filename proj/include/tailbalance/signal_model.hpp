#pragma once

// Ability-indexed signal family on [-1, +1].
//
// Under state A a juror of ability a draws a signal with density (1 + a s)/2,
// under state B with density (1 - a s)/2. Both densities pass through (0, 1/2);
// a = 0 is the uniform (useless) signal and a = 1 the most informative one.
// The two CDFs are tied by the reflection G_a(t) = 1 - F_a(-t).

#include <cstdint>
#include <random>
#include <string_view>

namespace tailbalance {

// Juror skill in [0, 1].
class Ability {
 public:
  explicit Ability(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

enum class State { A, B };

std::string_view to_string(State s) noexcept;

// Prior probability of state A together with its odds lambda = (1 - theta) / theta.
class Prior {
 public:
  explicit Prior(double theta);
  static Prior from_odds(double lambda);
  static Prior balanced() { return Prior(0.5); }

  double theta() const noexcept { return theta_; }
  double odds() const noexcept { return odds_; }
  bool is_balanced() const noexcept { return odds_ == 1.0; }

 private:
  Prior(double theta, double odds) : theta_(theta), odds_(odds) {}
  double theta_;
  double odds_;
};

// A point of the signal space [-1, +1].
class Signal {
 public:
  explicit Signal(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

double cdf_given_A(Ability a, Signal t) noexcept;
double cdf_given_B(Ability a, Signal t) noexcept;
double cdf_given_state(Ability a, Signal t, State state) noexcept;

double pdf_given_state(Ability a, Signal s, State state) noexcept;

// Analytic inverse of the CDF. Throws std::invalid_argument unless 0 <= u <= 1.
Signal quantile_given_state(Ability a, double u, State state);

// Seedable uniform stream. split(i) derives an independent child stream
// deterministically from (seed, i); used for chunked Monte Carlo.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  double uniform();  // [0, 1)
  RngStream split(std::uint64_t index) const;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

Signal sample_signal(Ability a, State state, RngStream& rng);

// P(A | S = s) for a single juror with prior theta.
double posterior_from_signal(Ability a, Signal s, Prior prior) noexcept;

}  // namespace tailbalance
