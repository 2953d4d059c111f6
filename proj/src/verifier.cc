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

#include "contestlab/verifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "contestlab/errors.h"

namespace contestlab {
namespace {

constexpr double kIndexTolerance = 1e-7;
// Masses below this are rounding dust, not support.
constexpr double kSupportMass = 1e-15;

double SnapIndex(double q) {
  const double r = std::round(q);
  return std::abs(q - r) < kIndexTolerance ? r : q;
}

// Payoff of every grid total against `opponent`.
std::vector<double> PayoffProfile(const DiscretePmf& opponent) {
  std::vector<double> v(opponent.probs.size());
  double below = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = below + 0.5 * opponent.probs[k] - opponent.grid.Point(static_cast<long>(k));
    below += opponent.probs[k];
  }
  return v;
}

// First grid index at or above x.
long CeilIndex(const Grid& grid, double x) {
  return std::max(0L, static_cast<long>(std::ceil(SnapIndex(x / grid.step()))));
}

struct Scenario {
  double prob;
  Signal to_self;  // what the player learns about the opponent
  Signal to_opp;   // what the opponent learns about the player
};

std::vector<Scenario> SignalScenarios(const FeedbackPolicy& policy, double own, double opp) {
  if (policy.kind() == PolicyKind::kRank && own == opp) {
    return {{0.5, RankSignal{true}, RankSignal{false}},
            {0.5, RankSignal{false}, RankSignal{true}}};
  }
  Rng unused(0);
  auto s = ExchangeSignals(policy, own, opp, unused);
  return {{1.0, s[0], s[1]}};
}

double ExpectedUtility(const DiscretePmf& own, const std::vector<double>& profile) {
  double u = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) u += own.probs[k] * profile[k];
  return u;
}

}  // namespace

Grid::Grid(double step, double max_total) : step_(step), max_total_(max_total) {
  if (!(step > 0.0) || !(max_total > 0.0)) {
    throw std::invalid_argument("grid step and max_total must be positive");
  }
  const double q = max_total / step;
  last_ = std::lround(q);
  if (std::abs(q - static_cast<double>(last_)) > kIndexTolerance) {
    throw std::invalid_argument("max_total must be a multiple of step");
  }
}

long Grid::IndexOf(double x) const {
  const double q = x / step_;
  const long k = std::lround(q);
  if (std::abs(q - static_cast<double>(k)) > kIndexTolerance || k < 0 || k > last_) {
    throw OffGrid(std::to_string(x) + " is not a point of the grid with step " +
                  std::to_string(step_));
  }
  return k;
}

long Grid::NearestIndex(double x) const {
  const double q = SnapIndex(x / step_);
  const long k = static_cast<long>(std::ceil(q - 0.5));
  return std::clamp(k, 0L, last_);
}

std::vector<double> DiscretePmf::SupportPoints() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > kSupportMass) out.push_back(grid.Point(static_cast<long>(k)));
  }
  return out;
}

double DiscretePmf::Mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) m += probs[k] * grid.Point(static_cast<long>(k));
  return m;
}

double DiscretePmf::TotalMass() const {
  double total = 0.0;
  for (double p : probs) total += p;
  return total;
}

DiscretePmf DiscretizeMixed(const MixedTotalBid& dist, const Grid& grid) {
  const double slack = grid.step() * kIndexTolerance;
  const bool has_atom = dist.atom_prob > 0.0 || dist.cont_prob <= 0.0;
  const bool has_cont = dist.cont_prob > 0.0;
  if ((has_atom && (dist.atom_at < -slack || dist.atom_at > grid.max_total() + slack)) ||
      (has_cont && (dist.cont_lo < -slack || dist.cont_hi > grid.max_total() + slack))) {
    throw SupportOverflow("law reaches " + std::to_string(dist.SupportMax()) +
                          ", beyond the grid maximum " + std::to_string(grid.max_total()));
  }
  DiscretePmf pmf{grid, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0)};
  if (has_atom) {
    pmf.probs[grid.NearestIndex(dist.atom_at)] += has_cont ? dist.atom_prob : 1.0;
  }
  if (has_cont) {
    // Work in index units; cell k is (k - 1, k].
    const double a = SnapIndex(dist.cont_lo / grid.step());
    const double b = SnapIndex(dist.cont_hi / grid.step());
    const long first = static_cast<long>(std::floor(a)) + 1;
    const long last = std::min(static_cast<long>(std::ceil(b)), grid.size() - 1);
    for (long k = first; k <= last; ++k) {
      const double overlap = std::min(static_cast<double>(k), b) -
                             std::max(static_cast<double>(k - 1), a);
      if (overlap > 0.0) pmf.probs[k] += dist.cont_prob * overlap / (b - a);
    }
  }
  return pmf;
}

double ExpectedPayoffVs(const DiscretePmf& opponent, double own_total) {
  const long k = opponent.grid.IndexOf(own_total);
  double below = 0.0;
  for (long j = 0; j < k; ++j) below += opponent.probs[j];
  return below + 0.5 * opponent.probs[k] - own_total;
}

ResponseGap BestResponseGap(const DiscretePmf& opponent, const DiscretePmf& candidate,
                            double floor) {
  const std::vector<double> profile = PayoffProfile(opponent);
  const long start = CeilIndex(opponent.grid, floor);
  ResponseGap r;
  r.best_value = -std::numeric_limits<double>::infinity();
  r.worst_value = std::numeric_limits<double>::infinity();
  for (long k = start; k < static_cast<long>(profile.size()); ++k) {
    if (profile[k] > r.best_value) {
      r.best_value = profile[k];
      r.best_point = opponent.grid.Point(k);
    }
  }
  for (std::size_t k = 0; k < candidate.probs.size(); ++k) {
    if (candidate.probs[k] > kSupportMass && profile[k] < r.worst_value) {
      r.worst_value = profile[k];
      r.worst_candidate = candidate.grid.Point(static_cast<long>(k));
    }
  }
  r.gap = std::max(0.0, r.best_value - r.worst_value);
  return r;
}

Stage2Report VerifyStage2Laws(const MixedTotalBid& law_1, const MixedTotalBid& law_2,
                              std::array<double, 2> stage1_bids, const Grid& grid,
                              double epsilon) {
  const DiscretePmf pmf_1 = DiscretizeMixed(law_1, grid);
  const DiscretePmf pmf_2 = DiscretizeMixed(law_2, grid);
  Stage2Report report;
  report.stage1_bids = stage1_bids;
  report.epsilon = epsilon;
  report.gaps[0] = BestResponseGap(pmf_2, pmf_1, stage1_bids[0]);
  report.gaps[1] = BestResponseGap(pmf_1, pmf_2, stage1_bids[1]);
  report.passed = report.gaps[0].gap <= epsilon && report.gaps[1].gap <= epsilon;
  return report;
}

Stage2Report VerifyStage2EpsilonEq(double b11, double b21, const Grid& grid, double epsilon) {
  return VerifyStage2Laws(Stage2HeadstartDistribution(b11, b21),
                          Stage2HeadstartDistribution(b21, b11), {b11, b21}, grid, epsilon);
}

Stage1Report VerifyStage1NoDeviation(const FeedbackPolicy& policy,
                                     std::array<double, 2> stage1_bids, const Grid& grid,
                                     double epsilon) {
  Stage1Report report;
  report.stage1_bids = stage1_bids;
  report.epsilon = epsilon;
  report.passed = true;
  const long last_stage1 = grid.IndexOf(std::min(1.0, grid.max_total()));
  const bool has_formula = policy.kind() != PolicyKind::kRank;

  for (int i = 0; i < 2; ++i) {
    const double own = stage1_bids[i];
    const double opp = stage1_bids[1 - i];
    PlayerDeviationReport& pr = report.players[i];

    pr.on_path_value = 0.0;
    for (const Scenario& s : SignalScenarios(policy, own, opp)) {
      const DiscretePmf own_pmf = DiscretizeMixed(CssStage2Law(policy, own, s.to_self), grid);
      const DiscretePmf opp_pmf = DiscretizeMixed(CssStage2Law(policy, opp, s.to_opp), grid);
      pr.on_path_value += s.prob * ExpectedUtility(own_pmf, PayoffProfile(opp_pmf));
    }

    pr.best_value = -std::numeric_limits<double>::infinity();
    double discrepancy = 0.0;
    for (long d = 0; d <= last_stage1; ++d) {
      const double deviation = grid.Point(d);
      double value = 0.0;
      double formula = 0.0;
      for (const Scenario& s : SignalScenarios(policy, deviation, opp)) {
        const DiscretePmf opp_pmf =
            DiscretizeMixed(CssStage2Law(policy, opp, s.to_opp), grid);
        const std::vector<double> profile = PayoffProfile(opp_pmf);
        const double best = *std::max_element(profile.begin() + d, profile.end());
        value += s.prob * best;
        if (has_formula) {
          formula += s.prob * Stage1Utility(policy, deviation,
                                            CheapestBid(policy, s.to_self, deviation));
        }
      }
      if (value > pr.best_value) {
        pr.best_value = value;
        pr.best_deviation = deviation;
      }
      discrepancy = std::max(discrepancy, std::abs(value - formula));
    }
    pr.gap = pr.best_value - pr.on_path_value;
    if (has_formula) pr.formula_discrepancy = discrepancy;
    report.deviation_gain = std::max(report.deviation_gain, pr.gap);
    if (pr.gap > epsilon || (has_formula && discrepancy > epsilon)) report.passed = false;
  }
  if (stage1_bids[0] > 0.0 && stage1_bids[1] > 0.0) {
    report.deviation_bound_holds =
        report.deviation_gain >= std::min(stage1_bids[0], stage1_bids[1]) - epsilon;
  }
  return report;
}

PolicyVerification VerifyPolicy(const FeedbackPolicy& policy, const Grid& grid, double epsilon,
                                double full_grid_step) {
  PolicyVerification out;
  out.policy = policy.Describe();
  out.step = grid.step();
  out.epsilon = epsilon;
  out.passed = true;

  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      out.headstart_sweep.push_back(VerifyStage2EpsilonEq(i / 10.0, j / 10.0, grid, epsilon));
      out.passed = out.passed && out.headstart_sweep.back().passed;
    }
  }

  for (const CseProfile& profile : CseStage1Profiles(policy, full_grid_step)) {
    const auto bids = profile.Stage1Bids();
    for (const Scenario& s : SignalScenarios(policy, bids[0], bids[1])) {
      out.cse_stage2.push_back(VerifyStage2Laws(CssStage2Law(policy, bids[0], s.to_self),
                                                CssStage2Law(policy, bids[1], s.to_opp), bids,
                                                grid, epsilon));
      out.passed = out.passed && out.cse_stage2.back().passed;
    }
    out.cse_stage1.push_back(VerifyStage1NoDeviation(profile, grid, epsilon));
    out.passed = out.passed && out.cse_stage1.back().passed;
  }

  if (policy.kind() == PolicyKind::kRank) {
    const DiscretePmf opp =
        DiscretizeMixed(RankEquilibriumStrategy(0.0, RankSignal{true}), grid);
    for (int k = 1; k <= 10; ++k) {
      const double b = k / 10.0;
      OffPathReport r;
      r.stage1_bid = b;
      r.gap = BestResponseGap(
          opp, DiscretizeMixed(RankEquilibriumStrategy(b, RankSignal{false}), grid), b);
      r.passed = r.gap.gap <= epsilon;
      out.passed = out.passed && r.passed;
      out.rank_off_path.push_back(r);
    }
  }
  return out;
}

}  // namespace contestlab
