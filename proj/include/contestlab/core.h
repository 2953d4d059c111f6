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

#ifndef CONTESTLAB_CORE_H_
#define CONTESTLAB_CORE_H_

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "contestlab/random.h"

namespace contestlab {

// All quantities are in units of the prize (prize value 1). The lab used a
// 20-dirham prize and a 40-dirham balance, i.e. a normalized budget of 2.
inline constexpr int kDirhamsPerPrize = 20;
inline constexpr int kBalanceDirhams = 40;
inline constexpr double kBudget = 2.0;

// An interval of stage-1 bids. A feedback cell always contains its
// infimum, so `lo_closed` is true for every cell of a validated policy.
struct IntervalCell {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = true;

  static IntervalCell Point(double x) { return {x, x, true, true}; }

  bool Contains(double x) const {
    const bool above = x > lo || (lo_closed && x == lo);
    const bool below = x < hi || (hi_closed && x == hi);
    return above && below;
  }
  bool IsEmpty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

  friend bool operator==(const IntervalCell&, const IntervalCell&) = default;
};

// Shortest decimal form that parses back to the same double.
std::string FormatNumber(double x);

std::string ToString(const IntervalCell& cell);

enum class PolicyKind { kPartition, kFull, kRank };

// A feedback policy: a partition of [0, 1] into cells (NoFeedback and
// Cutoff are partitions), the Full policy (every bid is its own cell), or
// Rank, whose signal depends on the receiver's own bid.
//
// Partition policies are only constructible through ValidatePolicy, so a
// FeedbackPolicy value always satisfies the cheapest-bid assumption.
class FeedbackPolicy {
 public:
  static FeedbackPolicy NoFeedback();
  static FeedbackPolicy Full();
  static FeedbackPolicy Rank();
  // {[0, c), [c, 1]}; requires 0 < c <= 1.
  static FeedbackPolicy Cutoff(double c);

  PolicyKind kind() const { return kind_; }
  bool is_partition() const { return kind_ == PolicyKind::kPartition; }
  // Sorted by lower end. Empty for Full and Rank.
  const std::vector<IntervalCell>& cells() const { return cells_; }

  bool IsNoFeedback() const;
  // The cutoff c when the policy is exactly {[0, c), [c, 1]}.
  std::optional<double> cutoff() const;

  // The cell containing `bid`. Bids above the prize value (possible in lab
  // data, where stage-1 bids go up to the budget) fall in the top cell.
  const IntervalCell& CellOf(double bid) const;

  // Infimum of the cell containing `bid`: the cheapest bid that sends the
  // same signal. Full returns the bid itself. Rank has no cells and throws
  // SignalPolicyMismatch.
  double CellInfimum(double bid) const;

  std::string Describe() const;

  friend bool operator==(const FeedbackPolicy&, const FeedbackPolicy&) = default;

 private:
  friend FeedbackPolicy ValidatePolicy(std::vector<IntervalCell> cells);
  FeedbackPolicy(PolicyKind kind, std::vector<IntervalCell> cells)
      : kind_(kind), cells_(std::move(cells)) {}

  PolicyKind kind_;
  std::vector<IntervalCell> cells_;
};

// Builds a partition policy from cells given in any order. Throws
// GapError if the cells leave part of [0, 1] uncovered, OverlapError if two
// cells share a point, OpenInfimumError if a cell excludes its infimum, and
// InvalidCellError for empty cells or cells outside [0, 1]. Coverage is
// checked before the infimum condition.
FeedbackPolicy ValidatePolicy(std::vector<IntervalCell> cells);

// What a player learns about the opponent's stage-1 bid.
struct CellSignal {
  IntervalCell cell;
  friend bool operator==(const CellSignal&, const CellSignal&) = default;
};
struct ExactBidSignal {
  double bid;
  friend bool operator==(const ExactBidSignal&, const ExactBidSignal&) = default;
};
struct RankSignal {
  bool opponent_higher;
  friend bool operator==(const RankSignal&, const RankSignal&) = default;
};
using Signal = std::variant<CellSignal, ExactBidSignal, RankSignal>;

std::string ToString(const Signal& signal);

// The signal a player with stage-1 bid `own_bid` receives about
// `opponent_bid`. Only Rank looks at `own_bid`, and only Rank draws from
// `tie_coin` (on equal bids).
Signal SignalOf(const FeedbackPolicy& policy, double opponent_bid,
                double own_bid, Rng& tie_coin);

// Both players' signals for one game: result[0] is what player 1 learns
// about player 2 and result[1] the reverse. A Rank tie is broken by a
// single coin, so the two rank signals are always complementary.
std::array<Signal, 2> ExchangeSignals(const FeedbackPolicy& policy, double bid_1, double bid_2,
                                      Rng& tie_coin);

// The belief point: the cheapest opponent bid consistent with `signal`.
// Rank: lower -> 0, higher -> own bid. Throws SignalPolicyMismatch when the
// signal variant cannot come from `policy`.
double CheapestBid(const FeedbackPolicy& policy, const Signal& signal,
                   double own_bid);

struct GameOutcome {
  std::array<double, 2> totals{};
  int winner = 1;  // 1 or 2
  bool tie = false;
  std::array<double, 2> payoffs{};
  double profit = 0.0;
};

// Realized payoffs for total bids (any nonnegative values). Ties go to a
// fair coin. payoffs[0] + payoffs[1] + profit == 0 holds exactly in floating
// point.
GameOutcome RealizedPayoffs(double total_1, double total_2, Rng& tie_coin);

// Dirhams to prize units; throws OutOfBudget outside [0, 40].
double NormalizeBid(int raw_dirhams);

}  // namespace contestlab

#endif  // CONTESTLAB_CORE_H_
