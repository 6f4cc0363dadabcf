#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tailbalance/errors.hpp"
#include "tailbalance/jury_sim.hpp"

using namespace tailbalance;

namespace {

JuryConfig make_config(const std::vector<double>& abilities, double theta = 0.5,
                       TieBreak tie = TieBreak::FollowSignalSign) {
  JuryConfig c;
  for (double a : abilities) c.abilities.emplace_back(a);
  c.prior = Prior(theta);
  c.tie_break = tie;
  return c;
}

int tie_code(TieBreak t) {
  switch (t) {
    case TieBreak::FollowSignalSign: return 0;
    case TieBreak::VoteA: return 1;
    case TieBreak::VoteB: return 2;
  }
  return 0;
}

}  // namespace

TEST_CASE("tie-break names") {
  for (TieBreak t : {TieBreak::FollowSignalSign, TieBreak::VoteA, TieBreak::VoteB}) {
    CHECK(tie_break_from_string(to_string(t)) == t);
  }
  CHECK(to_string(TieBreak::FollowSignalSign) == "follow_signal");
  CHECK_THROWS_AS(tie_break_from_string("coin"), std::invalid_argument);
}

TEST_CASE("vote threshold examples") {
  CHECK(vote_threshold(Ability(1.0), 0.5).value() == 0.0);
  CHECK(vote_threshold(Ability(0.5), 0.9).value() == -1.0);
  CHECK(vote_threshold(Ability(0.5), 0.1).value() == 1.0);
  CHECK(vote_threshold(Ability(0.8), 0.6).value() == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK_THROWS_AS(vote_threshold(Ability(0.0), 0.5), ZeroAbility);
}

TEST_CASE("threshold is a Bayes cut: posterior at s* is one half when interior") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = 0.01 + 0.99 * unit(rng);
    const double q = 0.01 + 0.98 * unit(rng);
    const double s = vote_threshold(Ability(a), q).value();
    const double lhs = q * (1 + a * s);
    const double rhs = (1 - q) * (1 - a * s);
    if (s > -1.0 && s < 1.0) {
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    } else if (s == -1.0) {
      CHECK(lhs >= rhs - 1e-12);
    } else {
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("vote probabilities match quadrature") {
  for (double a : {0.0, 0.3, 1.0}) {
    for (double q : {0.05, 0.3, 0.5, 0.62, 0.97}) {
      for (TieBreak t : {TieBreak::FollowSignalSign, TieBreak::VoteA, TieBreak::VoteB}) {
        const VoteProbabilities got = vote_probabilities(Ability(a), q, t);
        const oracle::VoteProb ref = oracle::vote_prob_by_quadrature(a, q, tie_code(t));
        CHECK(std::abs(got.given_A - ref.given_A) <= 1e-12);
        CHECK(std::abs(got.given_B - ref.given_B) <= 1e-12);
      }
    }
  }
}

TEST_CASE("cast_vote follows the threshold and tie rule") {
  CHECK(cast_vote(Ability(1.0), 0.5, Signal(0.1), TieBreak::FollowSignalSign) == Vote::A);
  CHECK(cast_vote(Ability(1.0), 0.5, Signal(-0.1), TieBreak::FollowSignalSign) == Vote::B);
  CHECK(cast_vote(Ability(0.0), 0.5, Signal(0.3), TieBreak::FollowSignalSign) == Vote::A);
  CHECK(cast_vote(Ability(0.0), 0.5, Signal(-0.3), TieBreak::FollowSignalSign) == Vote::B);
  CHECK(cast_vote(Ability(0.0), 0.5, Signal(0.3), TieBreak::VoteB) == Vote::B);
  CHECK(cast_vote(Ability(0.0), 0.5, Signal(-0.3), TieBreak::VoteA) == Vote::A);
  CHECK(cast_vote(Ability(0.0), 0.7, Signal(-0.9), TieBreak::VoteB) == Vote::A);
  CHECK(cast_vote(Ability(0.5), 0.9, Signal(-1.0), TieBreak::FollowSignalSign) == Vote::A);
}

TEST_CASE("exact verdict examples") {
  for (double a : {0.0, 0.25, 0.5, 1.0}) {
    const VerdictStats s = exact_verdict_probability(make_config({a}));
    CHECK(s.p_correct == doctest::Approx((2 + a) / 4).epsilon(1e-14));
    CHECK(s.method == Method::Exact);
    CHECK(s.std_error == 0.0);
  }
  CHECK(exact_verdict_probability(make_config({1.0})).p_correct ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(exact_verdict_probability(make_config({0.0})).p_correct == 0.5);
  for (double a : {0.4, 0.8}) {
    CHECK(exact_verdict_probability(make_config({a, a, a})).p_correct >
          exact_verdict_probability(make_config({a})).p_correct);
  }
  CHECK(exact_verdict_probability(make_config({0.4, 0.4, 0.4})).p_correct ==
        doctest::Approx(0.63766).epsilon(1e-5));
  CHECK(exact_verdict_probability(make_config({0.8, 0.8, 0.8})).p_correct ==
        doctest::Approx(0.76711).epsilon(1e-5));
}

TEST_CASE("full-ability single juror dominates") {
  const double top = exact_verdict_probability(make_config({1.0})).p_correct;
  for (int k = 0; k < 100; ++k) {
    CHECK(exact_verdict_probability(make_config({k / 100.0})).p_correct < top);
  }
}

TEST_CASE("exact recursion agrees with a brute-force product oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + 2 * static_cast<int>(unit(rng) * 4);  // 1..7
    std::vector<double> abilities;
    for (int i = 0; i < n; ++i) {
      const double r = unit(rng);
      abilities.push_back(r < 0.1 ? 0.0 : (r > 0.9 ? 1.0 : unit(rng)));
    }
    const double theta = trial % 3 == 0 ? 0.5 : 0.05 + 0.9 * unit(rng);
    const TieBreak tie = static_cast<TieBreak>(trial % 3);
    const VerdictStats got = exact_verdict_probability(make_config(abilities, theta, tie));
    const oracle::BruteVerdict ref = oracle::brute_force_verdict(abilities, theta, tie_code(tie));
    CHECK(std::abs(got.p_correct - ref.p_correct) <= 1e-12);
    CHECK(std::abs(got.p_correct_given_A - ref.given_A) <= 1e-12);
    CHECK(std::abs(got.p_correct_given_B - ref.given_B) <= 1e-12);
  }
}

TEST_CASE("exact recursion handles the enumeration cap") {
  std::vector<double> abilities;
  for (int i = 0; i < 25; ++i) abilities.push_back(0.3 + 0.02 * i);
  const VerdictStats s = exact_verdict_probability(make_config(abilities, 0.4));
  CHECK(s.p_correct > 0.5);
  CHECK(s.p_correct < 1.0);
  abilities.push_back(0.5);
  abilities.push_back(0.5);
  CHECK_THROWS_AS(exact_verdict_probability(make_config(abilities)), SizeLimit);
  CHECK_THROWS_AS(exact_verdict_probability(make_config({0.5, 0.5})), EvenJury);
  CHECK_THROWS_AS(exact_verdict_probability(make_config({})), std::invalid_argument);
}

TEST_CASE("A/B relabeling symmetry at a balanced prior") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> abilities;
    for (int i = 0; i < 5; ++i) abilities.push_back(unit(rng));
    const VerdictStats s = exact_verdict_probability(make_config(abilities));
    CHECK(std::abs(s.p_correct_given_A - s.p_correct_given_B) <= 1e-12);
  }
  // Unequal priors swap the conditional accuracies.
  const VerdictStats lo = exact_verdict_probability(make_config({0.3, 0.6, 0.9}, 0.3));
  const VerdictStats hi = exact_verdict_probability(make_config({0.3, 0.6, 0.9}, 0.7));
  CHECK(std::abs(lo.p_correct_given_A - hi.p_correct_given_B) <= 1e-12);
  CHECK(std::abs(lo.p_correct - hi.p_correct) <= 1e-12);
}

TEST_CASE("all-zero abilities give a coin flip") {
  for (int n : {1, 3, 5, 7}) {
    const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
    CHECK(std::abs(exact_verdict_probability(make_config(zeros)).p_correct - 0.5) <= 1e-12);
  }
}

TEST_CASE("history log-likelihoods match from-scratch replay at every node") {
  const JuryConfig config = make_config({0.9, 0.2, 1.0, 0.0, 0.6}, 0.35);
  int nodes = 0;
  double worst = 0.0;
  exact_verdict_probability(config, [&](const VoteHistory& h) {
    ++nodes;
    const VoteHistory fresh = replay_history(config, h.votes);
    worst = std::max({worst, std::abs(h.loglik_A - fresh.loglik_A),
                      std::abs(h.loglik_B - fresh.loglik_B)});
    // Plain-product oracle for the same history.
    double prob_A = 1.0;
    double prob_B = 1.0;
    for (std::size_t i = 0; i < h.votes.size(); ++i) {
      const double q = 0.35 * prob_A / (0.35 * prob_A + 0.65 * prob_B);
      const oracle::VoteProb vp =
          oracle::vote_prob_by_quadrature(config.abilities[i].value(), q, 0);
      prob_A *= h.votes[i] == Vote::A ? vp.given_A : 1 - vp.given_A;
      prob_B *= h.votes[i] == Vote::A ? vp.given_B : 1 - vp.given_B;
    }
    if (prob_A > 0.0) CHECK(std::abs(std::exp(h.loglik_A) - prob_A) <= 1e-12);
    if (prob_B > 0.0) CHECK(std::abs(std::exp(h.loglik_B) - prob_B) <= 1e-12);
  });
  CHECK(nodes > 1);
  CHECK(worst <= 1e-12);
}

TEST_CASE("Monte Carlo is deterministic and thread-count independent") {
  JuryConfig config = make_config({0.5, 0.9, 0.1});
  config.trials = 10000;
  config.seed = 42;
  const VerdictStats one = monte_carlo_verdict(config, SamplingMode::PriorDraw, 1);
  const VerdictStats again = monte_carlo_verdict(config, SamplingMode::PriorDraw, 1);
  const VerdictStats many = monte_carlo_verdict(config, SamplingMode::PriorDraw, 7);
  CHECK(one.p_correct == again.p_correct);
  CHECK(one.p_correct == many.p_correct);
  CHECK(one.std_error == many.std_error);
  CHECK(one.trials_used == 10000);
  CHECK(one.method == Method::MonteCarlo);
  config.seed = 43;
  CHECK(monte_carlo_verdict(config, SamplingMode::PriorDraw, 1).p_correct != one.p_correct);
}

TEST_CASE("Monte Carlo single full-ability juror") {
  JuryConfig config = make_config({1.0});
  config.trials = 100000;
  config.seed = 1;
  const VerdictStats s = monte_carlo_verdict(config);
  CHECK(std::abs(s.p_correct - 0.75) <= 3 * s.std_error);
  CHECK(s.std_error == doctest::Approx(std::sqrt(0.75 * 0.25 / 1e5)).epsilon(0.01));
}

TEST_CASE("Monte Carlo agrees with exact across seeds") {
  const std::vector<JuryConfig> configs = {make_config({0.3, 0.7, 0.0, 1.0, 0.5}, 0.6),
                                           make_config({0.0, 0.0, 0.0}, 0.5, TieBreak::VoteA)};
  for (const JuryConfig& base : configs) {
    const double exact = exact_verdict_probability(base).p_correct;
    for (SamplingMode mode : {SamplingMode::PriorDraw, SamplingMode::PerState}) {
      int inside = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        JuryConfig c = base;
        c.seed = seed;
        c.trials = 5000;
        const VerdictStats s = monte_carlo_verdict(c, mode);
        if (std::abs(s.p_correct - exact) <= 3 * s.std_error + 1e-15) ++inside;
      }
      CHECK(inside >= 18);
    }
  }
}

TEST_CASE("per-state mode estimates the same quantity with lower variance") {
  JuryConfig config = make_config({0.6, 0.6, 0.6}, 0.7);
  config.trials = 40000;
  config.seed = 9;
  const double exact = exact_verdict_probability(config).p_correct;
  const VerdictStats per_state = monte_carlo_verdict(config, SamplingMode::PerState);
  const VerdictStats prior_draw = monte_carlo_verdict(config, SamplingMode::PriorDraw);
  CHECK(std::abs(per_state.p_correct - exact) <= 3 * per_state.std_error);
  CHECK(per_state.std_error <= prior_draw.std_error * 1.05);
  config.trials = 1;
  CHECK_THROWS_AS(monte_carlo_verdict(config, SamplingMode::PerState), std::invalid_argument);
}

TEST_CASE("Monte Carlo input validation") {
  JuryConfig config = make_config({0.5, 0.5});
  CHECK_THROWS_AS(monte_carlo_verdict(config), EvenJury);
  config = make_config({0.5});
  config.trials = 0;
  CHECK_THROWS_AS(monte_carlo_verdict(config), std::invalid_argument);
}

TEST_CASE("order scan examples") {
  auto abilities = [](std::initializer_list<double> xs) {
    std::vector<Ability> out;
    for (double x : xs) out.emplace_back(x);
    return out;
  };
  const auto scan = order_scan(abilities({0.9, 0.5, 0.1}), Prior(0.5));
  REQUIRE(scan.size() == 6);
  CHECK(scan[0].ordering == std::vector<double>{0.5, 0.9, 0.1});
  CHECK(scan[0].rank == 1);
  CHECK(scan[0].p_correct - scan[1].p_correct > 1e-9);
  for (std::size_t i = 1; i < scan.size(); ++i) CHECK(scan[i - 1].p_correct >= scan[i].p_correct);

  const auto tied = order_scan(abilities({0.6, 0.6, 0.6}), Prior(0.5));
  REQUIRE(tied.size() == 6);
  for (const auto& r : tied) {
    CHECK(std::abs(r.p_correct - tied[0].p_correct) <= 1e-12);
    CHECK(r.rank == 1);
  }

  const auto second = order_scan(abilities({0.8, 0.6, 0.2}), Prior(0.5));
  CHECK(second[0].ordering == std::vector<double>{0.6, 0.8, 0.2});

  // Each entry equals a direct exact evaluation of its ordering.
  for (const auto& r : scan) {
    CHECK(r.p_correct == exact_verdict_probability(make_config(r.ordering)).p_correct);
  }
  CHECK_THROWS_AS(order_scan(abilities({0.5}), Prior(0.5)), SizeLimit);
  CHECK_THROWS_AS(order_scan(abilities({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}), Prior(0.5)),
                  SizeLimit);
  CHECK_THROWS_AS(order_scan(abilities({0.1, 0.2, 0.3, 0.4}), Prior(0.5)), EvenJury);
  CHECK(order_scan(abilities({0.1, 0.2, 0.3, 0.4, 0.5}), Prior(0.5)).size() == 120);
}
