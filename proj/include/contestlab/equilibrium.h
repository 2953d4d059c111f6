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

#ifndef CONTESTLAB_EQUILIBRIUM_H_
#define CONTESTLAB_EQUILIBRIUM_H_

#include <array>
#include <vector>

#include "contestlab/core.h"
#include "contestlab/random.h"

namespace contestlab {

// Law of a total bid: an atom plus a uniform component on the half-open
// interval (cont_lo, cont_hi]. Every equilibrium object of the two-stage
// game has this shape.
struct MixedTotalBid {
  double atom_at = 0.0;
  double atom_prob = 0.0;
  double cont_lo = 0.0;
  double cont_hi = 0.0;
  double cont_prob = 0.0;
  // Set when the law is one admissible member of a family (off-path CSS
  // bidding) rather than a uniquely determined prediction. Only the support
  // of a tagged law is meaningful.
  bool off_path = false;

  static MixedTotalBid Atom(double x) { return {x, 1.0, x, x, 0.0, false}; }
  // Uniform on (lo, hi].
  static MixedTotalBid Uniform(double lo, double hi) { return {lo, 0.0, lo, hi, 1.0, false}; }

  double Mean() const;
  double Cdf(double x) const;
  double SupportMax() const;
};

// Second-stage equilibrium with head starts: own stage-1 bid `own`, believed
// opponent stage-1 bid `opp`. Atom at `own` with probability |own - opp|,
// otherwise uniform on (max(own, opp), min(own, opp) + 1].
MixedTotalBid Stage2HeadstartDistribution(double own, double opp);

// Equilibrium utility of that second stage, net of stage-1 costs.
double Stage2EquilibriumUtility(double own, double opp);

// Cheapest-signal-strategy stage-2 law. On path (b1 is the infimum of its
// own cell) this is the head-start law against `opp_belief`. Off path the
// strategy only fixes the support (max(b1, belief), min(own_cell_inf,
// belief) + 1]; the uniform law on it is returned, tagged off_path.
// Throws EmptySupport if that interval is empty.
MixedTotalBid CssStage2Distribution(double b1, double own_cell_inf, double opp_belief,
                                    bool on_path);

// Rank feedback: a lower signal puts the belief at 0 (atom at b1 w.p. b1,
// else uniform on (b1, 1]); a higher signal gives uniform on (b1, 1].
MixedTotalBid RankEquilibriumStrategy(double b1, const Signal& signal);

// The stage-2 law a CSS player uses after bidding b1 and receiving
// `signal`, for any policy (dispatches to the two functions above).
MixedTotalBid CssStage2Law(const FeedbackPolicy& policy, double b1, const Signal& signal);

// A stage-1 equilibrium profile: one player bids zero, the other bids the
// infimum of some cell.
struct CseProfile {
  int zero_bidder = 1;  // 1 or 2
  double other_bid = 0.0;
  FeedbackPolicy policy = FeedbackPolicy::NoFeedback();

  std::array<double, 2> Stage1Bids() const {
    return zero_bidder == 1 ? std::array<double, 2>{0.0, other_bid}
                            : std::array<double, 2>{other_bid, 0.0};
  }
};

// All stage-1 CSE profiles: (0, 0) first, then both role assignments for
// every positive cell infimum. Full feedback has a continuum of cells, so
// the positive bids are the multiples of `full_grid_step` in (0, 1]. Rank
// only admits (0, 0).
std::vector<CseProfile> CseStage1Profiles(const FeedbackPolicy& policy,
                                          double full_grid_step = 0.05);

struct CssPrediction {
  double p_exceed_prize = 0.0;
  double p_dropout = 0.0;
  double mean_stage2 = 0.0;
};

// Sunk cost, head start and mean stage-2 bid predictions for a CSS player
// with stage-1 bid b1 facing belief point ubar_s.
CssPrediction CssPredictions(double b1, double ubar_s);

// Continuation value of stage-1 bid b1 against a CSS opponent whose belief
// point is opp_ubar: -min(opp_ubar, infimum of b1's cell). Not defined for
// Rank (throws SignalPolicyMismatch).
double Stage1Utility(const FeedbackPolicy& policy, double b1, double opp_ubar);

// Inverse-transform draw. Uniform draws landing exactly on cont_lo are
// redrawn to keep the interval half-open.
double SampleTotal(const MixedTotalBid& dist, Rng& rng);

// A finitely supported law on a bid lattice.
struct LatticeLaw {
  std::vector<double> points;
  std::vector<double> probs;

  double Sample(Rng& rng) const;
  double Mean() const;
};

// index * step, computed as index / (1 / step) when 1 / step is a whole
// number (0.15, not 0.15000000000000002).
double LatticePoint(long index, double step);

// Nearest lattice point to x, halfway cases rounding up.
double SnapToLattice(double x, double step);

// Maps a MixedTotalBid whose atom and interval ends are multiples of `step`
// onto the lattice, keeping the three quantities the second-stage
// predictions are about: the atom mass (dropout), the mass above the prize
// value (exceed), and the mean. The uniform part is spread over the lattice
// points in (cont_lo, cont_hi], separately below and above 1, with part of
// each region's mass moved to its lowest point so the mean matches. Very
// short intervals (fewer than about four lattice points) cannot absorb the
// whole correction; the remainder is left as mean bias. Throws OffGrid when
// an end is not on the lattice.
LatticeLaw MomentMatchedLattice(const MixedTotalBid& dist, double step);

}  // namespace contestlab

#endif  // CONTESTLAB_EQUILIBRIUM_H_
