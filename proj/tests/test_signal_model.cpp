#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "tailbalance/signal_model.hpp"

using namespace tailbalance;

namespace {

std::vector<double> grid(int n) {
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(-1.0 + 2.0 * i / (n - 1));
  return ts;
}

const std::vector<double> kAbilities = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

}  // namespace

TEST_CASE("domain types reject out-of-range values") {
  CHECK_THROWS_AS(Ability(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(Ability(1.01), std::invalid_argument);
  CHECK_THROWS_AS(Ability(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  CHECK_THROWS_AS(Signal(1.5), std::invalid_argument);
  CHECK_THROWS_AS(Prior(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Prior(1.0), std::invalid_argument);
  CHECK_THROWS_AS(Prior::from_odds(0.0), std::invalid_argument);
  CHECK_NOTHROW(Ability(0.0));
  CHECK_NOTHROW(Ability(1.0));
}

TEST_CASE("prior odds") {
  CHECK(Prior(0.5).odds() == 1.0);
  CHECK(Prior(0.5).is_balanced());
  CHECK_FALSE(Prior(0.4).is_balanced());
  CHECK(Prior(0.2).odds() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(Prior(0.7).odds() == (1.0 - 0.7) / 0.7);
  CHECK(Prior::from_odds(4.0).theta() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(Prior::from_odds(1.0).theta() == 0.5);
}

TEST_CASE("state-A CDF examples") {
  for (double t : grid(21)) {
    CHECK(cdf_given_A(Ability(0.0), Signal(t)) == doctest::Approx((t + 1) / 2).epsilon(1e-15));
  }
  for (double a : kAbilities) CHECK(cdf_given_A(Ability(a), Signal(-1.0)) == 0.0);
  CHECK(cdf_given_A(Ability(1.0), Signal(0.0)) == 0.25);
}

TEST_CASE("state-B CDF examples") {
  for (double t : grid(21)) {
    CHECK(cdf_given_B(Ability(0.0), Signal(t)) == doctest::Approx((t + 1) / 2).epsilon(1e-15));
  }
  CHECK(cdf_given_B(Ability(1.0), Signal(0.0)) == 0.75);
  for (double a : kAbilities) CHECK(cdf_given_B(Ability(a), Signal(1.0)) == 1.0);
}

TEST_CASE("signal symmetry G(t) = 1 - F(-t) on an 11 x 201 grid") {
  double worst = 0.0;
  for (double a : kAbilities) {
    for (double t : grid(201)) {
      worst = std::max(worst, std::abs(cdf_given_B(Ability(a), Signal(t)) -
                                       (1.0 - cdf_given_A(Ability(a), Signal(-t)))));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("CDF axioms") {
  for (double a : kAbilities) {
    for (State st : {State::A, State::B}) {
      double prev = -1.0;
      for (double t : grid(401)) {
        const double f = cdf_given_state(Ability(a), Signal(t), st);
        CHECK(f >= prev);
        prev = f;
      }
      CHECK(std::abs(cdf_given_state(Ability(a), Signal(-1.0), st)) <= 1e-12);
      CHECK(std::abs(cdf_given_state(Ability(a), Signal(1.0), st) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("density examples") {
  for (double a : kAbilities) CHECK(pdf_given_state(Ability(a), Signal(0.0), State::A) == 0.5);
  CHECK(pdf_given_state(Ability(1.0), Signal(1.0), State::B) == 0.0);
  // d/dt of (t+1)(at-a+2)/4 at a = t = 0.5, by central difference.
  const double h = 1e-5;
  const double fd = (cdf_given_A(Ability(0.5), Signal(0.5 + h)) -
                     cdf_given_A(Ability(0.5), Signal(0.5 - h))) / (2 * h);
  CHECK(fd == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(pdf_given_state(Ability(0.5), Signal(0.5), State::A) == doctest::Approx(0.625));
}

TEST_CASE("densities integrate to one and match the CDF slope") {
  const double step = 1e-4;
  for (double a : kAbilities) {
    for (State st : {State::A, State::B}) {
      const double mass =
          oracle::simpson([&](double s) { return pdf_given_state(Ability(a), Signal(s), st); },
                          -1.0, 1.0);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
      for (double t : grid(101)) {
        if (std::abs(t) == 1.0) continue;  // central differences only
        const double lo = t - step;
        const double hi = t + step;
        const double fd = (cdf_given_state(Ability(a), Signal(hi), st) -
                           cdf_given_state(Ability(a), Signal(lo), st)) / (hi - lo);
        CHECK(std::abs(fd - pdf_given_state(Ability(a), Signal(t), st)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("quantile examples and domain") {
  CHECK(quantile_given_state(Ability(0.0), 0.5, State::A).value() == 0.0);
  CHECK(quantile_given_state(Ability(1.0), 0.25, State::A).value() ==
        doctest::Approx(0.0).epsilon(1e-15));
  for (double a : kAbilities) {
    CHECK(quantile_given_state(Ability(a), 1.0, State::A).value() == 1.0);
    CHECK(quantile_given_state(Ability(a), 0.0, State::A).value() == -1.0);
  }
  CHECK_THROWS_AS(quantile_given_state(Ability(0.5), 1.5, State::A), std::invalid_argument);
  CHECK_THROWS_AS(quantile_given_state(Ability(0.5), -0.1, State::B), std::invalid_argument);
}

TEST_CASE("quantile inverts the CDF on a 101-point grid") {
  double worst = 0.0;
  for (double a : kAbilities) {
    for (State st : {State::A, State::B}) {
      for (int i = 0; i <= 100; ++i) {
        const double u = i / 100.0;
        const Signal t = quantile_given_state(Ability(a), u, st);
        worst = std::max(worst, std::abs(cdf_given_state(Ability(a), t, st) - u));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("quantile stays accurate for tiny abilities") {
  for (double a : {1e-12, 1e-8, 1e-4}) {
    for (double u : {0.01, 0.3, 0.77}) {
      const Signal t = quantile_given_state(Ability(a), u, State::A);
      CHECK(std::abs(cdf_given_A(Ability(a), t) - u) <= 1e-14);
    }
  }
}

TEST_CASE("inverse-transform sampling matches the uniform CDF at zero ability") {
  RngStream rng(2024);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(sample_signal(Ability(0.0), State::A, rng).value());
  const double d = oracle::ks_statistic(xs, [](double t) { return (t + 1) / 2; });
  CHECK(d < 0.01);
}

TEST_CASE("sample mean at full ability is 1/3") {
  const double mean_oracle =
      oracle::simpson([](double s) { return s * oracle::density_A(1.0, s); }, -1.0, 1.0);
  CHECK(mean_oracle == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  RngStream rng(7);
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = sample_signal(Ability(1.0), State::A, rng).value();
    sum += s;
    sum_sq += s * s;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - mean_oracle) <= 3 * se);
}

TEST_CASE("sampling is deterministic per seed and sub-streams differ") {
  RngStream a(99);
  RngStream b(99);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_signal(Ability(0.6), State::B, a).value() ==
          sample_signal(Ability(0.6), State::B, b).value());
  }
  RngStream root(5);
  RngStream c0 = root.split(0);
  RngStream c0_again = root.split(0);
  RngStream c1 = root.split(1);
  const double x0 = c0.uniform();
  CHECK(x0 == c0_again.uniform());
  CHECK(x0 != c1.uniform());
}

TEST_CASE("posterior examples") {
  CHECK(posterior_from_signal(Ability(1.0), Signal(1.0), Prior(0.5)) == 1.0);
  for (double a : kAbilities) {
    CHECK(posterior_from_signal(Ability(a), Signal(0.0), Prior(0.5)) == 0.5);
  }
  // Density ratio: 0.625 / (0.625 + 0.375).
  CHECK(posterior_from_signal(Ability(0.5), Signal(0.5), Prior(0.5)) ==
        doctest::Approx(0.625).epsilon(1e-15));
  for (double theta : {0.1, 0.5, 0.83}) {
    for (double s : grid(11)) {
      CHECK(posterior_from_signal(Ability(0.0), Signal(s), Prior(theta)) ==
            doctest::Approx(theta).epsilon(1e-15));
    }
  }
}

TEST_CASE("posterior is strictly increasing in the signal for a > 0") {
  for (double a : kAbilities) {
    if (a == 0.0) continue;
    for (double theta : {0.2, 0.5, 0.9}) {
      const auto ts = grid(201);
      for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(posterior_from_signal(Ability(a), Signal(ts[i]), Prior(theta)) >
              posterior_from_signal(Ability(a), Signal(ts[i - 1]), Prior(theta)));
      }
    }
  }
}
