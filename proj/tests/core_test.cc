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

#include "contestlab/core.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "contestlab/errors.h"

namespace contestlab {
namespace {

IntervalCell Closed(double lo, double hi) { return {lo, hi, true, true}; }
IntervalCell HalfOpen(double lo, double hi) { return {lo, hi, true, false}; }

TEST(ValidatePolicyTest, CutoffCellsAreCanonicalCutoff) {
  const FeedbackPolicy p = ValidatePolicy({Closed(0.25, 1.0), HalfOpen(0.0, 0.25)});
  EXPECT_EQ(p, FeedbackPolicy::Cutoff(0.25));
  ASSERT_TRUE(p.cutoff().has_value());
  EXPECT_EQ(*p.cutoff(), 0.25);
  EXPECT_EQ(p.Describe(), "cutoff:0.25");
}

TEST(ValidatePolicyTest, SingleCellIsNoFeedback) {
  const FeedbackPolicy p = ValidatePolicy({Closed(0.0, 1.0)});
  EXPECT_TRUE(p.IsNoFeedback());
  EXPECT_EQ(p, FeedbackPolicy::NoFeedback());
}

TEST(ValidatePolicyTest, UncoveredPointIsGap) {
  EXPECT_THROW(ValidatePolicy({HalfOpen(0.0, 0.5), {0.5, 1.0, false, true}}), GapError);
  EXPECT_THROW(ValidatePolicy({HalfOpen(0.0, 0.5)}), GapError);
  EXPECT_THROW(ValidatePolicy({Closed(0.0, 0.4), Closed(0.5, 1.0)}), GapError);
  EXPECT_THROW(ValidatePolicy({}), GapError);
}

TEST(ValidatePolicyTest, CellWithoutItsInfimumIsRejected) {
  EXPECT_THROW(ValidatePolicy({HalfOpen(0.0, 0.5), {0.5, 1.0, false, true}, IntervalCell::Point(0.5)}),
               OpenInfimumError);
}

TEST(ValidatePolicyTest, OverlapIsRejected) {
  EXPECT_THROW(ValidatePolicy({Closed(0.0, 0.5), Closed(0.5, 1.0)}), OverlapError);
  EXPECT_THROW(ValidatePolicy({Closed(0.0, 1.0), IntervalCell::Point(0.3)}), OverlapError);
}

TEST(ValidatePolicyTest, CellsOutsideUnitIntervalAreInvalid) {
  EXPECT_THROW(ValidatePolicy({Closed(0.0, 1.5)}), InvalidCellError);
  EXPECT_THROW(ValidatePolicy({Closed(-0.1, 1.0)}), InvalidCellError);
  EXPECT_THROW(ValidatePolicy({HalfOpen(0.3, 0.3), Closed(0.0, 1.0)}), InvalidCellError);
}

TEST(ValidatePolicyTest, DegenerateCellsAreAllowed) {
  const FeedbackPolicy p = ValidatePolicy({IntervalCell::Point(1.0), HalfOpen(0.0, 1.0)});
  EXPECT_EQ(p.CellOf(1.0), IntervalCell::Point(1.0));
  EXPECT_EQ(p.CellInfimum(0.99), 0.0);
}

TEST(FeedbackPolicyTest, CutoffRange) {
  EXPECT_THROW(FeedbackPolicy::Cutoff(0.0), InvalidCellError);
  EXPECT_THROW(FeedbackPolicy::Cutoff(1.2), InvalidCellError);
  const FeedbackPolicy top = FeedbackPolicy::Cutoff(1.0);
  EXPECT_EQ(top.CellOf(1.0).lo, 1.0);
  EXPECT_EQ(top.CellOf(0.999).lo, 0.0);
}

TEST(FeedbackPolicyTest, EndpointsAreExact) {
  const FeedbackPolicy p = FeedbackPolicy::Cutoff(0.25);
  EXPECT_EQ(p.CellOf(0.25).lo, 0.25);
  EXPECT_EQ(p.CellOf(std::nextafter(0.25, 0.0)).lo, 0.0);
  EXPECT_EQ(p.CellInfimum(0.7), 0.25);
  EXPECT_EQ(p.CellInfimum(1.6), 0.25);  // lab stage-1 bids may exceed 1
  EXPECT_THROW(p.CellOf(-0.01), InvalidCellError);
  EXPECT_EQ(FeedbackPolicy::Full().CellInfimum(0.37), 0.37);
  EXPECT_THROW(FeedbackPolicy::Rank().CellInfimum(0.3), SignalPolicyMismatch);
}

TEST(CheapestBidTest, Examples) {
  const FeedbackPolicy cut = FeedbackPolicy::Cutoff(0.5);
  EXPECT_EQ(CheapestBid(cut, CellSignal{Closed(0.5, 1.0)}, 0.0), 0.5);
  EXPECT_EQ(CheapestBid(FeedbackPolicy::Full(), ExactBidSignal{0.37}, 0.0), 0.37);
  EXPECT_EQ(CheapestBid(FeedbackPolicy::Rank(), RankSignal{true}, 0.4), 0.4);
  EXPECT_EQ(CheapestBid(FeedbackPolicy::Rank(), RankSignal{false}, 0.4), 0.0);
}

TEST(CheapestBidTest, MismatchedSignalThrows) {
  EXPECT_THROW(CheapestBid(FeedbackPolicy::Full(), RankSignal{true}, 0.4), SignalPolicyMismatch);
  EXPECT_THROW(CheapestBid(FeedbackPolicy::Rank(), ExactBidSignal{0.2}, 0.4), SignalPolicyMismatch);
  EXPECT_THROW(CheapestBid(FeedbackPolicy::NoFeedback(), ExactBidSignal{0.2}, 0.4),
               SignalPolicyMismatch);
}

TEST(SignalOfTest, Examples) {
  Rng rng(1);
  EXPECT_EQ(SignalOf(FeedbackPolicy::Cutoff(0.25), 0.1, 0.0, rng), Signal(CellSignal{HalfOpen(0.0, 0.25)}));
  EXPECT_EQ(SignalOf(FeedbackPolicy::Full(), 0.37, 0.0, rng), Signal(ExactBidSignal{0.37}));
  EXPECT_EQ(SignalOf(FeedbackPolicy::Rank(), 0.6, 0.4, rng), Signal(RankSignal{true}));
  EXPECT_EQ(SignalOf(FeedbackPolicy::Rank(), 0.2, 0.4, rng), Signal(RankSignal{false}));
}

TEST(SignalOfTest, RankTiesGiveComplementarySignals) {
  Rng rng(7);
  int first_higher = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto s = ExchangeSignals(FeedbackPolicy::Rank(), 0.3, 0.3, rng);
    const bool a = std::get<RankSignal>(s[0]).opponent_higher;
    const bool b = std::get<RankSignal>(s[1]).opponent_higher;
    ASSERT_NE(a, b);
    first_higher += a ? 1 : 0;
  }
  EXPECT_NEAR(first_higher / static_cast<double>(n), 0.5, 3.0 * 0.5 / std::sqrt(n));
}

// Random partitions: cut points on a 0.01 lattice; sometimes the top cell
// is split into [c, 1) and {1}.
FeedbackPolicy RandomPartition(Rng& rng) {
  std::set<int> cuts;
  const int k = static_cast<int>(UniformIndex(rng, 6));
  while (static_cast<int>(cuts.size()) < k) cuts.insert(1 + static_cast<int>(UniformIndex(rng, 99)));
  std::vector<double> pts = {0.0};
  for (int c : cuts) pts.push_back(c / 100.0);
  pts.push_back(1.0);
  std::vector<IntervalCell> cells;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) cells.push_back(HalfOpen(pts[i], pts[i + 1]));
  if (FairCoin(rng)) {
    cells.push_back(IntervalCell::Point(1.0));
  } else {
    cells.back().hi_closed = true;
  }
  Shuffle(cells, rng);
  return ValidatePolicy(cells);
}

TEST(PartitionPropertyTest, EveryBidInExactlyOneCellAndCheapestBidIsBelow) {
  Rng rng(20261016);
  for (int trial = 0; trial < 200; ++trial) {
    const FeedbackPolicy p = RandomPartition(rng);
    for (int i = 0; i < 200; ++i) {
      const double b = i < 101 ? i / 100.0 : Uniform01(rng);
      int containing = 0;
      for (const IntervalCell& c : p.cells()) containing += c.Contains(b) ? 1 : 0;
      ASSERT_EQ(containing, 1) << p.Describe() << " bid " << b;
      const Signal s = SignalOf(p, b, 0.0, rng);
      const double cheapest = CheapestBid(p, s, 0.0);
      EXPECT_LE(cheapest, b);
      EXPECT_EQ(SignalOf(p, cheapest, 0.0, rng), s);
    }
  }
}

TEST(RealizedPayoffsTest, Examples) {
  Rng rng(3);
  const GameOutcome o = RealizedPayoffs(1.2, 0.7, rng);
  EXPECT_EQ(o.winner, 1);
  EXPECT_FALSE(o.tie);
  EXPECT_DOUBLE_EQ(o.payoffs[0], -0.2);
  EXPECT_DOUBLE_EQ(o.payoffs[1], -0.7);
  EXPECT_DOUBLE_EQ(o.profit, 0.9);
  EXPECT_EQ(o.payoffs[0] + o.payoffs[1] + o.profit, 0.0);

  const GameOutcome z = RealizedPayoffs(0.0, 0.0, rng);
  EXPECT_TRUE(z.tie);
  EXPECT_EQ(z.profit, -1.0);
}

TEST(RealizedPayoffsTest, TieCoinIsFair) {
  Rng rng(11);
  const int n = 100000;
  int wins_1 = 0;
  double payoff_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const GameOutcome o = RealizedPayoffs(0.5, 0.5, rng);
    wins_1 += o.winner == 1 ? 1 : 0;
    payoff_sum += o.payoffs[0];
  }
  const double sigma = 0.5 / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(wins_1 / static_cast<double>(n), 0.5, 3.0 * sigma);
  // Expected payoff 1/2 - 0.5 = 0; each draw is +-0.5.
  EXPECT_NEAR(payoff_sum / n, 0.0, 3.0 * sigma);
}

TEST(RealizedPayoffsTest, AccountingIdentityIsExact) {
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double a = 2.0 * Uniform01(rng);
    const double b = i % 3 == 0 ? a : 2.0 * Uniform01(rng);
    const GameOutcome o = RealizedPayoffs(a, b, rng);
    ASSERT_EQ(o.payoffs[0] + o.payoffs[1] + o.profit, 0.0);
    ASSERT_NEAR(o.profit, a + b - 1.0, 1e-12);
    if (a != b) ASSERT_EQ(o.winner, a > b ? 1 : 2);
  }
}

TEST(NormalizeBidTest, Examples) {
  EXPECT_EQ(NormalizeBid(20), 1.0);
  EXPECT_EQ(NormalizeBid(0), 0.0);
  EXPECT_EQ(NormalizeBid(5), 0.25);
  EXPECT_EQ(NormalizeBid(40), 2.0);
  EXPECT_THROW(NormalizeBid(41), OutOfBudget);
  EXPECT_THROW(NormalizeBid(-1), OutOfBudget);
}

TEST(ErrorsTest, ExitCodes) {
  EXPECT_EQ(ParseError("x").exit_code(), 2);
  EXPECT_EQ(GapError("x").exit_code(), 3);
  EXPECT_EQ(OpenInfimumError("x").exit_code(), 3);
  EXPECT_EQ(OutOfBudget("x").exit_code(), 4);
  EXPECT_EQ(UnbalancedConfig("x").exit_code(), 6);
  EXPECT_EQ(SchemaError("x").exit_code(), 8);
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatNumber(0.25), "0.25");
  EXPECT_EQ(FormatNumber(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(FormatNumber(1.0), "1");
  EXPECT_EQ(ToString(HalfOpen(0.0, 0.25)), "[0,0.25)");
  EXPECT_EQ(ToString(IntervalCell::Point(0.5)), "{0.5}");
}

}  // namespace
}  // namespace contestlab
