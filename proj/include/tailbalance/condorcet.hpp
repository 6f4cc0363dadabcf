#pragma once

// Condorcet's binary baseline: n independent jurors, each correct with
// probability p > 1/2, simple majority.

#include <vector>

namespace tailbalance {

struct CondorcetModel {
  double p;  // per-juror correctness, 1/2 < p <= 1
  int n;     // odd jury size >= 1

  void validate() const;
};

struct MajorityTail {
  double correct;    // P(more than n/2 correct votes)
  double incorrect;  // 1 - correct, summed directly so it stays accurate near 0
};

// Both binomial tails, accumulated in log space (safe for n up to 10^4 and beyond).
MajorityTail condorcet_tails(const CondorcetModel& model);

double condorcet_exact(const CondorcetModel& model);

struct CurvePoint {
  int n;
  double probability;
  double failure;  // 1 - probability
};

// One point per odd n <= n_max. Requires p > 1/2 and odd n_max >= 1.
std::vector<CurvePoint> condorcet_curve(double p, int n_max);

}  // namespace tailbalance
