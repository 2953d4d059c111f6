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

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "contestlab/errors.h"

namespace contestlab {

std::string FormatNumber(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  // Prefer the shortest representation that round-trips.
  for (int precision = 1; precision <= 17; ++precision) {
    char shorter[32];
    std::snprintf(shorter, sizeof(shorter), "%.*g", precision, x);
    if (std::stod(shorter) == x) return shorter;
  }
  return buf;
}

std::string ToString(const IntervalCell& cell) {
  if (cell.lo == cell.hi) return "{" + FormatNumber(cell.lo) + "}";
  return std::string(cell.lo_closed ? "[" : "(") + FormatNumber(cell.lo) +
         "," + FormatNumber(cell.hi) + (cell.hi_closed ? "]" : ")");
}

FeedbackPolicy FeedbackPolicy::NoFeedback() {
  return FeedbackPolicy(PolicyKind::kPartition, {IntervalCell{0.0, 1.0, true, true}});
}

FeedbackPolicy FeedbackPolicy::Full() { return FeedbackPolicy(PolicyKind::kFull, {}); }

FeedbackPolicy FeedbackPolicy::Rank() { return FeedbackPolicy(PolicyKind::kRank, {}); }

FeedbackPolicy FeedbackPolicy::Cutoff(double c) {
  if (!(c > 0.0 && c <= 1.0)) {
    throw InvalidCellError("cutoff must lie in (0, 1], got " + FormatNumber(c));
  }
  return ValidatePolicy({IntervalCell{0.0, c, true, false}, IntervalCell{c, 1.0, true, true}});
}

bool FeedbackPolicy::IsNoFeedback() const {
  return is_partition() && cells_.size() == 1;
}

std::optional<double> FeedbackPolicy::cutoff() const {
  if (!is_partition() || cells_.size() != 2) return std::nullopt;
  const IntervalCell& low = cells_[0];
  const IntervalCell& high = cells_[1];
  if (low.lo == 0.0 && !low.hi_closed && high.lo == low.hi && high.hi == 1.0 &&
      high.hi_closed) {
    return high.lo;
  }
  return std::nullopt;
}

const IntervalCell& FeedbackPolicy::CellOf(double bid) const {
  if (!is_partition()) {
    throw SignalPolicyMismatch("policy " + Describe() + " has no cells");
  }
  if (bid < 0.0) throw InvalidCellError("negative bid " + FormatNumber(bid));
  if (bid > 1.0) return cells_.back();
  // Cells are sorted; the last cell whose infimum is <= bid is the only
  // candidate.
  auto it = std::upper_bound(cells_.begin(), cells_.end(), bid,
                             [](double b, const IntervalCell& c) { return b < c.lo; });
  while (it != cells_.begin()) {
    --it;
    if (it->Contains(bid)) return *it;
  }
  throw GapError("no cell contains " + FormatNumber(bid));
}

double FeedbackPolicy::CellInfimum(double bid) const {
  switch (kind_) {
    case PolicyKind::kFull:
      return bid;
    case PolicyKind::kPartition:
      return CellOf(bid).lo;
    case PolicyKind::kRank:
      break;
  }
  throw SignalPolicyMismatch("rank feedback has no cells");
}

std::string FeedbackPolicy::Describe() const {
  switch (kind_) {
    case PolicyKind::kFull:
      return "full";
    case PolicyKind::kRank:
      return "rank";
    case PolicyKind::kPartition:
      break;
  }
  if (IsNoFeedback()) return "none";
  if (auto c = cutoff()) return "cutoff:" + FormatNumber(*c);
  std::ostringstream out;
  out << "cells:";
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (i) out << ';';
    out << FormatNumber(cells_[i].lo) << ',' << FormatNumber(cells_[i].hi) << ','
        << cells_[i].lo_closed << ',' << cells_[i].hi_closed;
  }
  return out.str();
}

FeedbackPolicy ValidatePolicy(std::vector<IntervalCell> cells) {
  if (cells.empty()) throw GapError("no cells");
  for (const IntervalCell& c : cells) {
    if (c.lo < 0.0 || c.hi > 1.0 || c.IsEmpty()) {
      throw InvalidCellError("cell " + ToString(c) + " is empty or outside [0,1]");
    }
  }
  std::sort(cells.begin(), cells.end(), [](const IntervalCell& a, const IntervalCell& b) {
    return std::make_tuple(a.lo, !a.lo_closed, a.hi) < std::make_tuple(b.lo, !b.lo_closed, b.hi);
  });

  // Sweep left to right. `reach` is the right end of everything covered so
  // far and `reach_covered` whether the point `reach` itself is covered.
  double reach = 0.0;
  bool reach_covered = false;
  for (const IntervalCell& c : cells) {
    if (c.lo < reach || (c.lo == reach && c.lo_closed && reach_covered)) {
      throw OverlapError("cell " + ToString(c) + " overlaps a previous cell");
    }
    if (c.lo > reach || (!c.lo_closed && !reach_covered)) {
      throw GapError("point " + FormatNumber(reach) + " is not covered (next cell " +
                     ToString(c) + ")");
    }
    reach = c.hi;
    reach_covered = c.hi_closed;
  }
  if (reach < 1.0 || !reach_covered) {
    throw GapError("cells do not reach 1");
  }
  for (const IntervalCell& c : cells) {
    if (!c.lo_closed) {
      throw OpenInfimumError("cell " + ToString(c) + " does not contain its infimum");
    }
  }
  return FeedbackPolicy(PolicyKind::kPartition, std::move(cells));
}

std::string ToString(const Signal& signal) {
  struct Visitor {
    std::string operator()(const CellSignal& s) const { return "cell " + ToString(s.cell); }
    std::string operator()(const ExactBidSignal& s) const {
      return "exact " + FormatNumber(s.bid);
    }
    std::string operator()(const RankSignal& s) const {
      return s.opponent_higher ? "rank higher" : "rank lower";
    }
  };
  return std::visit(Visitor{}, signal);
}

Signal SignalOf(const FeedbackPolicy& policy, double opponent_bid, double own_bid,
                Rng& tie_coin) {
  switch (policy.kind()) {
    case PolicyKind::kPartition:
      return CellSignal{policy.CellOf(opponent_bid)};
    case PolicyKind::kFull:
      return ExactBidSignal{opponent_bid};
    case PolicyKind::kRank:
      break;
  }
  if (opponent_bid != own_bid) return RankSignal{opponent_bid > own_bid};
  return RankSignal{FairCoin(tie_coin)};
}

std::array<Signal, 2> ExchangeSignals(const FeedbackPolicy& policy, double bid_1, double bid_2,
                                      Rng& tie_coin) {
  if (policy.kind() == PolicyKind::kRank && bid_1 == bid_2) {
    const bool two_higher = FairCoin(tie_coin);
    return {RankSignal{two_higher}, RankSignal{!two_higher}};
  }
  return {SignalOf(policy, bid_2, bid_1, tie_coin), SignalOf(policy, bid_1, bid_2, tie_coin)};
}

double CheapestBid(const FeedbackPolicy& policy, const Signal& signal, double own_bid) {
  switch (policy.kind()) {
    case PolicyKind::kPartition:
      if (const auto* s = std::get_if<CellSignal>(&signal)) return s->cell.lo;
      break;
    case PolicyKind::kFull:
      if (const auto* s = std::get_if<ExactBidSignal>(&signal)) return s->bid;
      break;
    case PolicyKind::kRank:
      if (const auto* s = std::get_if<RankSignal>(&signal)) {
        return s->opponent_higher ? own_bid : 0.0;
      }
      break;
  }
  throw SignalPolicyMismatch("signal '" + ToString(signal) + "' cannot come from policy " +
                             policy.Describe());
}

GameOutcome RealizedPayoffs(double total_1, double total_2, Rng& tie_coin) {
  GameOutcome out;
  out.totals = {total_1, total_2};
  if (total_1 == total_2) {
    out.tie = true;
    out.winner = FairCoin(tie_coin) ? 1 : 2;
  } else {
    out.winner = total_1 > total_2 ? 1 : 2;
  }
  out.payoffs[0] = (out.winner == 1 ? 1.0 : 0.0) - total_1;
  out.payoffs[1] = (out.winner == 2 ? 1.0 : 0.0) - total_2;
  // total_1 + total_2 - 1
  out.profit = -(out.payoffs[0] + out.payoffs[1]);
  return out;
}

double NormalizeBid(int raw_dirhams) {
  if (raw_dirhams < 0 || raw_dirhams > kBalanceDirhams) {
    throw OutOfBudget("bid of " + std::to_string(raw_dirhams) + " dirhams outside [0, " +
                      std::to_string(kBalanceDirhams) + "]");
  }
  return static_cast<double>(raw_dirhams) / kDirhamsPerPrize;
}

}  // namespace contestlab
