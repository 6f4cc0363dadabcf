#pragma once

// Sequential Bayesian jury voting over the signal family.
//
// Jurors vote in a fixed order. Each sees the earlier votes and abilities,
// forms the posterior q of state A from them, then votes A iff its own signal
// s satisfies q(1 + a s) >= (1 - q)(1 - a s), i.e. s >= (1 - 2q)/a.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "tailbalance/signal_model.hpp"

namespace tailbalance {

// Rule applied when the posterior before the signal is exactly 1/2 and the
// juror has zero ability.
enum class TieBreak { FollowSignalSign, VoteA, VoteB };

std::string_view to_string(TieBreak t) noexcept;
TieBreak tie_break_from_string(std::string_view name);

struct JuryConfig {
  std::vector<Ability> abilities;  // voting order
  Prior prior = Prior::balanced();
  TieBreak tie_break = TieBreak::FollowSignalSign;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;

  // Non-empty jury, trials >= 1; with require_odd also an odd jury (EvenJury).
  void validate(bool require_odd = true) const;
};

enum class Vote { A, B };

// P(vote A | state) for one juror.
struct VoteProbabilities {
  double given_A;
  double given_B;
};

// Votes cast so far and their log-probability under each state.
struct VoteHistory {
  std::vector<Vote> votes;
  double loglik_A = 0.0;
  double loglik_B = 0.0;

  // Posterior of A given the history; requires the history to be possible
  // under at least one state.
  double posterior_A(Prior prior) const;
  VoteHistory extended(Vote v, VoteProbabilities p) const;
};

// Signal cutoff s* = clamp((1 - 2q)/a, -1, 1). Throws ZeroAbility when a = 0.
Signal vote_threshold(Ability a, double posterior_A_before_signal);

VoteProbabilities vote_probabilities(Ability a, double posterior_A_before_signal, TieBreak tie);

Vote cast_vote(Ability a, double posterior_A_before_signal, Signal s, TieBreak tie);

// Recompute a history's log-likelihoods from scratch for the first votes.size() jurors.
VoteHistory replay_history(const JuryConfig& config, std::span<const Vote> votes);

enum class Method { Exact, MonteCarlo };

std::string_view to_string(Method m) noexcept;

struct VerdictStats {
  double p_correct = 0.0;
  Method method = Method::Exact;
  double std_error = 0.0;
  std::int64_t trials_used = 0;
  // Correct-verdict probability conditional on each true state.
  double p_correct_given_A = 0.0;
  double p_correct_given_B = 0.0;
};

inline constexpr std::size_t kMaxExactJury = 25;

// Exact majority-verdict accuracy by enumerating vote histories.
// Throws EvenJury for even n and SizeLimit for n > kMaxExactJury.
VerdictStats exact_verdict_probability(const JuryConfig& config);

// Same, calling `visit` on every reachable node of the history tree (root included).
VerdictStats exact_verdict_probability(const JuryConfig& config,
                                       const std::function<void(const VoteHistory&)>& visit);

enum class SamplingMode {
  PriorDraw,  // each trial draws the state from the prior
  PerState,   // half the trials under each state, reweighted by the prior
};

inline constexpr std::int64_t kTrialsPerChunk = 4096;

// Monte Carlo estimate. Trials are split into chunks of kTrialsPerChunk, chunk k
// seeded from (seed, k); the result does not depend on `threads` (0 = hardware).
VerdictStats monte_carlo_verdict(const JuryConfig& config,
                                 SamplingMode mode = SamplingMode::PriorDraw, unsigned threads = 0);

struct OrderingResult {
  std::vector<double> ordering;
  double p_correct = 0.0;
  int rank = 1;  // 1-based, shared by orderings tied within 1e-12
};

inline constexpr std::size_t kMaxOrderScan = 7;

// Exact verdict probability of all n! voting orders, sorted best first.
std::vector<OrderingResult> order_scan(const std::vector<Ability>& abilities, Prior prior,
                                       TieBreak tie = TieBreak::FollowSignalSign);

}  // namespace tailbalance
