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

#ifndef CONTESTLAB_SIMULATOR_H_
#define CONTESTLAB_SIMULATOR_H_

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "contestlab/core.h"
#include "contestlab/dataset.h"
#include "contestlab/equilibrium.h"
#include "contestlab/random.h"

namespace contestlab {

// Which cell a CSS agent targets when it takes the positive stage-1 role.
struct CellSelector {
  enum class Kind {
    kZero,             // always the zero cell: the robust equilibrium
    kHighest,          // the highest cell infimum
    kUniformPositive,  // uniform over positive cell infima
    kFixed,            // the infimum of the cell containing `target`
  };
  Kind kind = Kind::kZero;
  double target = 0.0;
};

// Cheapest-signal strategy. With probability coordination_p the agent plays
// the positive role (bids its selected cell's infimum), otherwise it bids
// zero. Draws are independent across the pair, so both players end up
// positive with probability coordination_p^2.
struct CssAgent {
  double coordination_p = 0.0;
  CellSelector selector;
};

// CSS in both stages, then adds lambda * min(b1, ubar_s) to the stage-2
// total (capped at the budget). lambda = 0 reproduces the base agent draw
// for draw.
struct SunkCostAgent {
  double lambda = 0.0;
  CssAgent base;
};

// Ignores the game: stage-1 bid from stage1_law, stage-2 bid from
// stage2_law, both clipped to the remaining budget.
struct NoiseAgent {
  MixedTotalBid stage1_law = MixedTotalBid::Atom(0.0);
  MixedTotalBid stage2_law = MixedTotalBid::Atom(0.0);
};

using AgentSpec = std::variant<CssAgent, SunkCostAgent, NoiseAgent>;

struct PlayOptions {
  // 0 plays in continuous bids. A positive step puts every bid on the
  // lattice {0, step, 2 step, ...}: CSS totals use MomentMatchedLattice,
  // other continuous draws round to the nearest point (halfway rounds up).
  double bid_step = 0.0;
  double budget = kBudget;
  // Positive stage-1 bids available to selectors under Full and Rank.
  double representative_step = 0.05;
};

double ChooseStage1(const AgentSpec& agent, const FeedbackPolicy& policy,
                    const PlayOptions& options, Rng& rng);
double ChooseTotal(const AgentSpec& agent, const FeedbackPolicy& policy, double b1,
                   const Signal& signal, const PlayOptions& options, Rng& rng);

struct PlayerTurn {
  double b1 = 0.0;
  double b2 = 0.0;
  Signal received = CellSignal{};
};

struct GamePlay {
  std::array<PlayerTurn, 2> players;
  GameOutcome outcome;
};

// Stage 1, signals, stage 2 (total kept within [b1, budget]), payoffs.
GamePlay PlayGame(const FeedbackPolicy& policy, const AgentSpec& agent_1,
                  const AgentSpec& agent_2, Rng& rng, const PlayOptions& options = {});

// Stage 2 only, for given stage-1 bids; both players use CSS laws.
GamePlay PlayCssStage2(const FeedbackPolicy& policy, std::array<double, 2> stage1_bids, Rng& rng,
                       const PlayOptions& options = {});

// The two subject-round rows of one game.
std::array<BidRecord, 2> ToBidRecords(const GamePlay& game, int session, int round,
                                      const std::string& phase, const std::string& treatment,
                                      std::array<int, 2> subjects);

// Right-continuous empirical CDF at each grid point.
std::vector<std::pair<double, double>> EmpiricalCdf(std::vector<double> values,
                                                    const std::vector<double>& grid);

// sup_x |F_n(x) - F(x)| for a continuous reference CDF.
double SupDistance(std::vector<double> values, const std::function<double(double)>& cdf);

struct BatchOptions {
  PlayOptions play;
  std::vector<double> cdf_grid;  // empty: 0, 0.01, ..., budget
  bool keep_samples = false;
  // Called after every game, e.g. to stream rows to a file.
  std::function<void(const GamePlay&)> on_game;
};

struct BatchSummary {
  long n_games = 0;
  double mean_profit = 0.0;
  std::array<double, 2> mean_payoffs{};
  double sd_profit = 0.0;
  std::array<double, 2> mean_totals{};
  std::vector<std::pair<double, double>> cdf_stage1;
  std::vector<std::pair<double, double>> cdf_stage2;
  std::vector<std::pair<double, double>> cdf_total;
  // Both players' values, game by game; filled when keep_samples is set.
  std::vector<double> stage1_samples;
  std::vector<double> stage2_samples;
  std::vector<double> total_samples;
};

// Plays n_games of a CSE profile (stage 2 from CssStage2Law). Zero games
// give an all-zero summary.
BatchSummary RunBatch(const FeedbackPolicy& policy, const CseProfile& profile, long n_games,
                      Rng& rng, const BatchOptions& options = {});

// Same aggregation for two agents.
BatchSummary RunAgentBatch(const FeedbackPolicy& policy, const AgentSpec& agent_1,
                           const AgentSpec& agent_2, long n_games, Rng& rng,
                           const BatchOptions& options = {});

struct AgentMixEntry {
  double weight = 1.0;
  AgentSpec agent;
};

struct ExperimentConfig {
  int n_sessions = 12;
  // One entry per session, or a single entry used for every session.
  std::vector<int> subjects_per_session = {16};
  int rounds_per_treatment = 5;
  int practice_rounds = 5;
  std::vector<std::string> treatments = {"F", "R", "C5", "C10"};
  // Optional explicit per-session orders; must be position balanced.
  std::vector<std::vector<std::string>> treatment_orders;
  double budget = kBudget;
  double bid_step = 1.0 / kDirhamsPerPrize;
  std::uint64_t seed = 0;

  int SubjectsIn(int session_index) const;
  int TotalSubjects() const;
};

struct SessionPlan {
  std::vector<std::vector<std::string>> orders;  // [session][position]
  // [session][round] -> pairs of subject indices local to the session.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> matchings;
};

// Position-balanced treatment orders (stacked random Latin squares, each
// treatment in each position n_sessions / T times) and a uniform random
// perfect matching for every round. Fewer sessions than treatments get
// distinct rows of one square. Throws UnbalancedConfig.
SessionPlan PlanSessions(const ExperimentConfig& config, Rng& rng);

// Practice (NONE) rounds then the treatment blocks for every session;
// subjects are numbered 1..TotalSubjects() across sessions and keep the
// agent drawn for them from `agent_pool` (by weight). Rows come out ordered
// by (session, round, subject). Rounds are numbered 1.. within a session,
// practice included.
std::vector<BidRecord> RunExperiment(const ExperimentConfig& config,
                                     const std::vector<AgentMixEntry>& agent_pool, Rng& rng);

}  // namespace contestlab

#endif  // CONTESTLAB_SIMULATOR_H_
