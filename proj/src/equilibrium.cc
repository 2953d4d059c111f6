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

#include "contestlab/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "contestlab/errors.h"

namespace contestlab {

double MixedTotalBid::Mean() const {
  return atom_prob * atom_at + cont_prob * 0.5 * (cont_lo + cont_hi);
}

double MixedTotalBid::Cdf(double x) const {
  double f = x >= atom_at ? atom_prob : 0.0;
  if (cont_prob > 0.0 && x > cont_lo) {
    f += cont_prob * std::min(1.0, (x - cont_lo) / (cont_hi - cont_lo));
  }
  return f;
}

double MixedTotalBid::SupportMax() const {
  double top = atom_prob > 0.0 ? atom_at : 0.0;
  if (cont_prob > 0.0) top = std::max(top, cont_hi);
  return top;
}

MixedTotalBid Stage2HeadstartDistribution(double own, double opp) {
  const double head_start = std::abs(own - opp);
  if (head_start >= 1.0) return MixedTotalBid::Atom(own);
  MixedTotalBid d;
  d.atom_at = own;
  d.atom_prob = head_start;
  d.cont_lo = std::max(own, opp);
  d.cont_hi = std::min(own, opp) + 1.0;
  d.cont_prob = 1.0 - head_start;
  return d;
}

double Stage2EquilibriumUtility(double own, double opp) { return -std::min(own, opp); }

MixedTotalBid CssStage2Distribution(double b1, double own_cell_inf, double opp_belief,
                                    bool on_path) {
  if (on_path) {
    if (b1 != own_cell_inf) {
      throw std::invalid_argument("on-path CSS bid must equal its cell infimum");
    }
    return Stage2HeadstartDistribution(b1, opp_belief);
  }
  if (!(b1 > own_cell_inf)) {
    throw std::invalid_argument("off-path CSS bid must exceed its cell infimum");
  }
  const double lo = std::max(b1, opp_belief);
  const double hi = std::min(own_cell_inf, opp_belief) + 1.0;
  if (lo >= hi) {
    throw EmptySupport("off-path interval (" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "] is empty");
  }
  MixedTotalBid d = MixedTotalBid::Uniform(lo, hi);
  d.atom_at = b1;
  d.off_path = true;
  return d;
}

MixedTotalBid RankEquilibriumStrategy(double b1, const Signal& signal) {
  const auto* rank = std::get_if<RankSignal>(&signal);
  if (rank == nullptr) {
    throw SignalPolicyMismatch("rank strategy needs a rank signal, got " + ToString(signal));
  }
  if (!rank->opponent_higher) return Stage2HeadstartDistribution(b1, 0.0);
  if (b1 >= 1.0) return MixedTotalBid::Atom(b1);
  return MixedTotalBid::Uniform(b1, 1.0);
}

MixedTotalBid CssStage2Law(const FeedbackPolicy& policy, double b1, const Signal& signal) {
  if (policy.kind() == PolicyKind::kRank) return RankEquilibriumStrategy(b1, signal);
  const double own_inf = policy.CellInfimum(b1);
  const double belief = CheapestBid(policy, signal, b1);
  return CssStage2Distribution(b1, own_inf, belief, b1 == own_inf);
}

std::vector<CseProfile> CseStage1Profiles(const FeedbackPolicy& policy, double full_grid_step) {
  std::vector<CseProfile> out;
  out.push_back({1, 0.0, policy});
  std::vector<double> positive;
  switch (policy.kind()) {
    case PolicyKind::kRank:
      return out;
    case PolicyKind::kPartition:
      for (const IntervalCell& c : policy.cells()) {
        if (c.lo > 0.0) positive.push_back(c.lo);
      }
      break;
    case PolicyKind::kFull: {
      if (!(full_grid_step > 0.0 && full_grid_step <= 1.0)) {
        throw std::invalid_argument("full_grid_step must be in (0, 1]");
      }
      const double per_unit = 1.0 / full_grid_step;
      const long n = std::lround(per_unit);
      const bool exact = std::abs(per_unit - static_cast<double>(n)) < 1e-9;
      for (long k = 1;; ++k) {
        const double bid = exact ? static_cast<double>(k) / static_cast<double>(n)
                                 : static_cast<double>(k) * full_grid_step;
        if (bid > 1.0 + 1e-12) break;
        positive.push_back(std::min(bid, 1.0));
      }
      break;
    }
  }
  for (double b : positive) {
    out.push_back({1, b, policy});
    out.push_back({2, b, policy});
  }
  return out;
}

CssPrediction CssPredictions(double b1, double ubar_s) {
  CssPrediction p;
  const double diff = b1 - ubar_s;
  p.p_exceed_prize = std::min(b1, ubar_s);
  p.p_dropout = std::abs(diff);
  p.mean_stage2 = diff >= 0.0 ? 0.5 * (1.0 - diff) * (1.0 - diff) : 0.5 * (1.0 - diff * diff);
  return p;
}

double Stage1Utility(const FeedbackPolicy& policy, double b1, double opp_ubar) {
  return -std::min(opp_ubar, policy.CellInfimum(b1));
}

double SampleTotal(const MixedTotalBid& dist, Rng& rng) {
  if (dist.cont_prob <= 0.0 || Uniform01(rng) < dist.atom_prob) return dist.atom_at;
  const double width = dist.cont_hi - dist.cont_lo;
  for (;;) {
    // 1 - U lies in (0, 1], so x lies in [lo, hi] and hits lo only through
    // rounding.
    const double x = dist.cont_lo + width * (1.0 - Uniform01(rng));
    if (x > dist.cont_lo) return x;
  }
}

double LatticeLaw::Sample(Rng& rng) const {
  const double u = Uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return points[i];
  }
  return points.back();
}

double LatticeLaw::Mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) m += points[i] * probs[i];
  return m;
}

namespace {

long LatticeIndex(double x, double step, const char* what) {
  const double q = x / step;
  const long k = std::lround(q);
  if (std::abs(q - static_cast<double>(k)) > 1e-7) {
    throw OffGrid(std::string(what) + " " + std::to_string(x) + " is not a multiple of " +
                  std::to_string(step));
  }
  return k;
}

}  // namespace

double LatticePoint(long index, double step) {
  const double per_unit = 1.0 / step;
  const double n = std::round(per_unit);
  if (std::abs(per_unit - n) < 1e-9) return static_cast<double>(index) / n;
  return static_cast<double>(index) * step;
}

double SnapToLattice(double x, double step) {
  return LatticePoint(static_cast<long>(std::floor(x / step + 0.5 + 1e-9)), step);
}

LatticeLaw MomentMatchedLattice(const MixedTotalBid& dist, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("lattice step must be positive");
  LatticeLaw law;
  const double atom_prob = dist.cont_prob > 0.0 ? dist.atom_prob : 1.0;
  if (atom_prob > 0.0) {
    law.points.push_back(LatticePoint(LatticeIndex(dist.atom_at, step, "atom"), step));
    law.probs.push_back(atom_prob);
  }
  if (dist.cont_prob <= 0.0) return law;

  const long lo = LatticeIndex(dist.cont_lo, step, "interval start");
  const long hi = LatticeIndex(dist.cont_hi, step, "interval end");
  const long count = hi - lo;
  if (count <= 0) throw EmptySupport("interval has no lattice points");
  const long prize = LatticeIndex(1.0, step, "prize value");
  const long below = std::clamp(prize - lo, 0L, count);  // points in (lo, 1]
  const long above = count - below;                     // points in (1, hi]

  // Uniform lattice mass overshoots the mean by step / 2. Moving a fraction
  // alpha of a region's mass onto its lowest point lowers the mean by
  // alpha * mass * step * (k - 1) / 2 for a region of k points.
  const double unit = dist.cont_prob / static_cast<double>(count);
  auto capacity = [&](long k) {
    return k > 1 ? unit * static_cast<double>(k) * step * static_cast<double>(k - 1) / 2.0 : 0.0;
  };
  const double needed = dist.cont_prob * step / 2.0;
  const double total_capacity = capacity(below) + capacity(above);
  const double alpha = total_capacity > 0.0 ? std::min(1.0, needed / total_capacity) : 0.0;

  auto add_region = [&](long first, long k) {
    if (k <= 0) return;
    const double mass = unit * static_cast<double>(k);
    for (long j = 0; j < k; ++j) {
      double p = (1.0 - alpha) * unit;
      if (j == 0) p += alpha * mass;
      law.points.push_back(LatticePoint(first + j, step));
      law.probs.push_back(p);
    }
  };
  add_region(lo + 1, below);
  add_region(lo + 1 + below, above);
  return law;
}

}  // namespace contestlab
