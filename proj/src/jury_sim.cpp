#include "tailbalance/jury_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "tailbalance/errors.hpp"

namespace tailbalance {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_prob(double p) { return p <= 0.0 ? kNegInf : std::log(p); }

struct ChunkTally {
  std::int64_t trials_A = 0;
  std::int64_t correct_A = 0;
  std::int64_t trials_B = 0;
  std::int64_t correct_B = 0;
};

// One simulated jury under `truth`; returns whether the majority was correct.
bool simulate_jury(const JuryConfig& config, State truth, RngStream& rng) {
  double loglik_A = 0.0;
  double loglik_B = 0.0;
  std::size_t votes_for_A = 0;
  const double log_odds = std::log(config.prior.odds());
  for (const Ability& a : config.abilities) {
    const double r = (loglik_B - loglik_A) + log_odds;
    const double q = 1.0 / (1.0 + std::exp(r));
    const Signal s = sample_signal(a, truth, rng);
    const Vote v = cast_vote(a, q, s, config.tie_break);
    const VoteProbabilities p = vote_probabilities(a, q, config.tie_break);
    if (v == Vote::A) {
      ++votes_for_A;
      loglik_A += log_prob(p.given_A);
      loglik_B += log_prob(p.given_B);
    } else {
      loglik_A += log_prob(1.0 - p.given_A);
      loglik_B += log_prob(1.0 - p.given_B);
    }
  }
  const bool majority_A = 2 * votes_for_A > config.abilities.size();
  return majority_A == (truth == State::A);
}

ChunkTally run_chunk(const JuryConfig& config, SamplingMode mode, std::int64_t chunk,
                     std::int64_t begin, std::int64_t end) {
  RngStream rng = RngStream(config.seed).split(static_cast<std::uint64_t>(chunk));
  ChunkTally tally;
  for (std::int64_t i = begin; i < end; ++i) {
    State truth;
    if (mode == SamplingMode::PriorDraw) {
      truth = rng.uniform() < config.prior.theta() ? State::A : State::B;
    } else {
      truth = i % 2 == 0 ? State::A : State::B;
    }
    const bool correct = simulate_jury(config, truth, rng);
    if (truth == State::A) {
      ++tally.trials_A;
      tally.correct_A += correct ? 1 : 0;
    } else {
      ++tally.trials_B;
      tally.correct_B += correct ? 1 : 0;
    }
  }
  return tally;
}

struct Enumerator {
  const JuryConfig& config;
  const std::function<void(const VoteHistory&)>* visit;
  VoteHistory node;
  std::size_t votes_for_A = 0;
  double correct_A = 0.0;
  double correct_B = 0.0;

  void descend() {
    const std::size_t depth = node.votes.size();
    const std::size_t n = config.abilities.size();
    if (visit) (*visit)(node);
    if (depth == n) {
      if (2 * votes_for_A > n) {
        correct_A += std::exp(node.loglik_A);
      } else {
        correct_B += std::exp(node.loglik_B);
      }
      return;
    }
    const double q = node.posterior_A(config.prior);
    const VoteProbabilities p = vote_probabilities(config.abilities[depth], q, config.tie_break);
    for (Vote v : {Vote::A, Vote::B}) {
      const double step_A = v == Vote::A ? p.given_A : 1.0 - p.given_A;
      const double step_B = v == Vote::A ? p.given_B : 1.0 - p.given_B;
      if (step_A <= 0.0 && step_B <= 0.0) continue;
      const double saved_A = node.loglik_A;
      const double saved_B = node.loglik_B;
      node.votes.push_back(v);
      node.loglik_A += log_prob(step_A);
      node.loglik_B += log_prob(step_B);
      if (v == Vote::A) ++votes_for_A;
      if (node.loglik_A != kNegInf || node.loglik_B != kNegInf) descend();
      if (v == Vote::A) --votes_for_A;
      node.votes.pop_back();
      node.loglik_A = saved_A;
      node.loglik_B = saved_B;
    }
  }
};

}  // namespace

std::string_view to_string(TieBreak t) noexcept {
  switch (t) {
    case TieBreak::FollowSignalSign: return "follow_signal";
    case TieBreak::VoteA: return "vote_a";
    case TieBreak::VoteB: return "vote_b";
  }
  return "follow_signal";
}

TieBreak tie_break_from_string(std::string_view name) {
  if (name == "follow_signal") return TieBreak::FollowSignalSign;
  if (name == "vote_a") return TieBreak::VoteA;
  if (name == "vote_b") return TieBreak::VoteB;
  throw std::invalid_argument("tie_break must be one of follow_signal, vote_a, vote_b; got '" +
                              std::string(name) + "'");
}

std::string_view to_string(Method m) noexcept {
  return m == Method::Exact ? "exact" : "monte_carlo";
}

void JuryConfig::validate(bool require_odd) const {
  if (abilities.empty()) throw std::invalid_argument("jury needs at least one juror");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (require_odd && abilities.size() % 2 == 0) {
    throw EvenJury("majority verdict needs an odd jury, got " + std::to_string(abilities.size()) +
                   " jurors");
  }
}

double VoteHistory::posterior_A(Prior prior) const {
  if (loglik_A == kNegInf && loglik_B == kNegInf) {
    throw std::logic_error("vote history has probability zero under both states");
  }
  // log odds of B over A; exactly zero for equal scores under a balanced prior.
  const double r = (loglik_B - loglik_A) + std::log(prior.odds());
  return 1.0 / (1.0 + std::exp(r));
}

VoteHistory VoteHistory::extended(Vote v, VoteProbabilities p) const {
  VoteHistory out = *this;
  out.votes.push_back(v);
  if (v == Vote::A) {
    out.loglik_A += log_prob(p.given_A);
    out.loglik_B += log_prob(p.given_B);
  } else {
    out.loglik_A += log_prob(1.0 - p.given_A);
    out.loglik_B += log_prob(1.0 - p.given_B);
  }
  return out;
}

Signal vote_threshold(Ability a, double q) {
  if (a.value() == 0.0) {
    throw ZeroAbility("juror with ability 0 has no informative signal threshold");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("posterior must lie in [0, 1], got " + std::to_string(q));
  }
  return Signal(std::clamp((1.0 - 2.0 * q) / a.value(), -1.0, 1.0));
}

VoteProbabilities vote_probabilities(Ability a, double q, TieBreak tie) {
  if (a.value() == 0.0) {
    if (q > 0.5) return {1.0, 1.0};
    if (q < 0.5) return {0.0, 0.0};
    switch (tie) {
      case TieBreak::FollowSignalSign: return {0.5, 0.5};  // uniform signal, P(s >= 0)
      case TieBreak::VoteA: return {1.0, 1.0};
      case TieBreak::VoteB: return {0.0, 0.0};
    }
  }
  const Signal cut = vote_threshold(a, q);
  return {1.0 - cdf_given_A(a, cut), 1.0 - cdf_given_B(a, cut)};
}

Vote cast_vote(Ability a, double q, Signal s, TieBreak tie) {
  auto tie_vote = [&] {
    switch (tie) {
      case TieBreak::VoteA: return Vote::A;
      case TieBreak::VoteB: return Vote::B;
      case TieBreak::FollowSignalSign: break;
    }
    return s.value() >= 0.0 ? Vote::A : Vote::B;
  };
  if (a.value() == 0.0) {
    if (q > 0.5) return Vote::A;
    if (q < 0.5) return Vote::B;
    return tie_vote();
  }
  const double cut = (1.0 - 2.0 * q) / a.value();
  if (s.value() > cut) return Vote::A;
  if (s.value() < cut) return Vote::B;
  return tie_vote();
}

VoteHistory replay_history(const JuryConfig& config, std::span<const Vote> votes) {
  if (votes.size() > config.abilities.size()) {
    throw std::invalid_argument("history longer than the jury");
  }
  VoteHistory h;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    const double q = h.posterior_A(config.prior);
    h = h.extended(votes[i], vote_probabilities(config.abilities[i], q, config.tie_break));
  }
  return h;
}

VerdictStats exact_verdict_probability(const JuryConfig& config,
                                       const std::function<void(const VoteHistory&)>& visit) {
  config.validate(true);
  if (config.abilities.size() > kMaxExactJury) {
    throw SizeLimit("exact enumeration is limited to " + std::to_string(kMaxExactJury) +
                    " jurors, got " + std::to_string(config.abilities.size()));
  }
  Enumerator e{config, visit ? &visit : nullptr, {}, 0, 0.0, 0.0};
  e.node.votes.reserve(config.abilities.size());
  e.descend();
  const double theta = config.prior.theta();
  VerdictStats out;
  out.method = Method::Exact;
  out.p_correct_given_A = std::clamp(e.correct_A, 0.0, 1.0);
  out.p_correct_given_B = std::clamp(e.correct_B, 0.0, 1.0);
  out.p_correct = theta * out.p_correct_given_A + (1.0 - theta) * out.p_correct_given_B;
  return out;
}

VerdictStats exact_verdict_probability(const JuryConfig& config) {
  return exact_verdict_probability(config, {});
}

VerdictStats monte_carlo_verdict(const JuryConfig& config, SamplingMode mode, unsigned threads) {
  config.validate(true);
  if (mode == SamplingMode::PerState && config.trials < 2) {
    throw std::invalid_argument("per-state sampling needs at least 2 trials");
  }
  const std::int64_t chunks = (config.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<ChunkTally> tallies(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t k = next++; k < chunks; k = next++) {
      const std::int64_t begin = k * kTrialsPerChunk;
      const std::int64_t end = std::min(config.trials, begin + kTrialsPerChunk);
      tallies[static_cast<std::size_t>(k)] = run_chunk(config, mode, k, begin, end);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  ChunkTally total;
  for (const ChunkTally& t : tallies) {
    total.trials_A += t.trials_A;
    total.correct_A += t.correct_A;
    total.trials_B += t.trials_B;
    total.correct_B += t.correct_B;
  }
  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  VerdictStats out;
  out.method = Method::MonteCarlo;
  out.trials_used = config.trials;
  out.p_correct_given_A = ratio(total.correct_A, total.trials_A);
  out.p_correct_given_B = ratio(total.correct_B, total.trials_B);
  if (mode == SamplingMode::PriorDraw) {
    const double p = ratio(total.correct_A + total.correct_B, config.trials);
    out.p_correct = p;
    out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(config.trials));
  } else {
    const double theta = config.prior.theta();
    const double pa = out.p_correct_given_A;
    const double pb = out.p_correct_given_B;
    out.p_correct = theta * pa + (1.0 - theta) * pb;
    out.std_error = std::sqrt(theta * theta * pa * (1.0 - pa) / static_cast<double>(total.trials_A) +
                              (1.0 - theta) * (1.0 - theta) * pb * (1.0 - pb) /
                                  static_cast<double>(total.trials_B));
  }
  return out;
}

std::vector<OrderingResult> order_scan(const std::vector<Ability>& abilities, Prior prior,
                                       TieBreak tie) {
  const std::size_t n = abilities.size();
  if (n < 3 || n > kMaxOrderScan) {
    throw SizeLimit("order scan supports 3 to " + std::to_string(kMaxOrderScan) +
                    " jurors, got " + std::to_string(n));
  }
  if (n % 2 == 0) throw EvenJury("order scan needs an odd jury, got " + std::to_string(n));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<OrderingResult> results;
  do {
    JuryConfig config;
    config.prior = prior;
    config.tie_break = tie;
    OrderingResult r;
    for (std::size_t i : perm) {
      config.abilities.push_back(abilities[i]);
      r.ordering.push_back(abilities[i].value());
    }
    r.p_correct = exact_verdict_probability(config).p_correct;
    results.push_back(std::move(r));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::stable_sort(results.begin(), results.end(),
                   [](const OrderingResult& x, const OrderingResult& y) {
                     return x.p_correct > y.p_correct;
                   });
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i > 0 && results[i - 1].p_correct - results[i].p_correct <= 1e-12) {
      results[i].rank = results[i - 1].rank;
    } else {
      results[i].rank = static_cast<int>(i) + 1;
    }
  }
  return results;
}

}  // namespace tailbalance
