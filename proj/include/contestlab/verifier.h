// Copyright 2026 The ContestLab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONTESTLAB_VERIFIER_H_
#define CONTESTLAB_VERIFIER_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "contestlab/core.h"
#include "contestlab/equilibrium.h"

namespace contestlab {

// Bid grid {0, step, 2 step, ..., max_total}. Points are index * step, so
// membership tests work on indices.
class Grid {
 public:
  explicit Grid(double step = 0.01, double max_total = kBudget);

  double step() const { return step_; }
  double max_total() const { return max_total_; }
  long size() const { return last_ + 1; }
  double Point(long index) const { return static_cast<double>(index) * step_; }
  // Index of an exact grid point; throws OffGrid.
  long IndexOf(double x) const;
  // Nearest grid index, halfway cases rounding down.
  long NearestIndex(double x) const;

 private:
  double step_;
  double max_total_;
  long last_;
};

// A law on the grid, stored densely (probs[k] is the mass at Point(k)).
struct DiscretePmf {
  Grid grid;
  std::vector<double> probs;

  std::vector<double> SupportPoints() const;
  double Mean() const;
  double TotalMass() const;
};

// Atom to the nearest grid point; the uniform part to grid points by
// integrating it over the cells (Point(k-1), Point(k)]. Throws
// SupportOverflow if the law puts mass above max_total or below 0.
DiscretePmf DiscretizeMixed(const MixedTotalBid& dist, const Grid& grid);

// P[opp < own] + P[opp = own] / 2 - own. Throws OffGrid.
double ExpectedPayoffVs(const DiscretePmf& opponent, double own_total);

struct ResponseGap {
  double gap = 0.0;             // best value minus worst candidate value, >= 0
  double best_point = 0.0;      // argmax over grid points >= floor
  double best_value = 0.0;
  double worst_candidate = 0.0;  // argmin over the candidate's support
  double worst_value = 0.0;
};

// How far the worst point in the candidate's support falls short of the
// best grid response at or above `floor` (the player's own stage-1 bid).
ResponseGap BestResponseGap(const DiscretePmf& opponent, const DiscretePmf& candidate,
                            double floor);

struct Stage2Report {
  std::array<double, 2> stage1_bids{};
  std::array<ResponseGap, 2> gaps{};
  double epsilon = 0.0;
  bool passed = false;
};

// Both players use the head-start law for stage-1 bids (b11, b21); passes
// iff each player's best-response gap is at most epsilon.
Stage2Report VerifyStage2EpsilonEq(double b11, double b21, const Grid& grid, double epsilon);

// Same check for arbitrary laws, each floored at its player's stage-1 bid.
Stage2Report VerifyStage2Laws(const MixedTotalBid& law_1, const MixedTotalBid& law_2,
                              std::array<double, 2> stage1_bids, const Grid& grid,
                              double epsilon);

struct PlayerDeviationReport {
  double on_path_value = 0.0;    // expected utility of the prescribed play
  double best_deviation = 0.0;   // stage-1 bid maximizing the continuation
  double best_value = 0.0;       // brute-force continuation at that bid
  double gap = 0.0;              // best_value - on_path_value
  // Largest |brute force - closed form| over all stage-1 bids; empty for
  // Rank, which has no closed-form continuation.
  std::optional<double> formula_discrepancy;
};

struct Stage1Report {
  std::array<double, 2> stage1_bids{};
  std::array<PlayerDeviationReport, 2> players{};
  double deviation_gain = 0.0;  // max over players of gap
  double epsilon = 0.0;
  bool passed = false;          // both gaps (and formula discrepancies) <= epsilon
  // Set when both stage-1 bids are positive: the best deviation gains at
  // least min(b11, b21) - epsilon.
  std::optional<bool> deviation_bound_holds;
};

// Scans every grid stage-1 bid in [0, 1] for each player against a CSS
// opponent. The continuation of a deviation is computed by brute force: the
// opponent's CSS law given the signal the deviation sends, discretized,
// and the deviator's best grid total at or above its stage-1 bid. It is
// compared with Stage1Utility where that is defined.
Stage1Report VerifyStage1NoDeviation(const FeedbackPolicy& policy,
                                     std::array<double, 2> stage1_bids, const Grid& grid,
                                     double epsilon);
inline Stage1Report VerifyStage1NoDeviation(const CseProfile& profile, const Grid& grid,
                                            double epsilon) {
  return VerifyStage1NoDeviation(profile.policy, profile.Stage1Bids(), grid, epsilon);
}

// A player who deviated in stage 1 and plays its off-path law against an
// opponent on the equilibrium path. Only the deviator's gap is checked: the
// opponent best-responds to its belief, not to the deviation.
struct OffPathReport {
  double stage1_bid = 0.0;
  ResponseGap gap;
  bool passed = false;
};

struct PolicyVerification {
  std::string policy;
  double step = 0.0;
  double epsilon = 0.0;
  std::vector<Stage2Report> headstart_sweep;   // 0.1-grid of [0, 1]^2
  std::vector<Stage2Report> cse_stage2;        // CSS laws of each CSE profile
  std::vector<Stage1Report> cse_stage1;
  std::vector<OffPathReport> rank_off_path;    // Rank only
  bool passed = false;
};

// Everything `contestlab verify` checks for one policy.
PolicyVerification VerifyPolicy(const FeedbackPolicy& policy, const Grid& grid, double epsilon,
                                double full_grid_step = 0.05);

}  // namespace contestlab

#endif  // CONTESTLAB_VERIFIER_H_
