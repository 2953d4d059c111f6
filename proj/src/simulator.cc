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

#include "contestlab/simulator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "contestlab/errors.h"

namespace contestlab {
namespace {

double Clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

double OnLatticeOrRaw(double x, const PlayOptions& options) {
  return options.bid_step > 0.0 ? SnapToLattice(x, options.bid_step) : x;
}

std::vector<double> PositiveInfima(const FeedbackPolicy& policy, const PlayOptions& options) {
  std::vector<double> out;
  if (policy.is_partition()) {
    for (const IntervalCell& c : policy.cells()) {
      if (c.lo > 0.0) out.push_back(c.lo);
    }
    return out;
  }
  for (long k = 1;; ++k) {
    const double b = LatticePoint(k, options.representative_step);
    if (b > 1.0 + 1e-12) break;
    out.push_back(b);
  }
  return out;
}

double SelectPositive(const CellSelector& selector, const FeedbackPolicy& policy,
                      const PlayOptions& options, Rng& rng) {
  using Kind = CellSelector::Kind;
  switch (selector.kind) {
    case Kind::kZero:
      return 0.0;
    case Kind::kFixed:
      if (policy.is_partition()) return policy.CellOf(selector.target).lo;
      return OnLatticeOrRaw(Clamp(selector.target, 0.0, 1.0), options);
    case Kind::kHighest:
    case Kind::kUniformPositive:
      break;
  }
  const std::vector<double> infima = PositiveInfima(policy, options);
  if (infima.empty()) return 0.0;
  if (selector.kind == Kind::kHighest) return infima.back();
  return infima[UniformIndex(rng, infima.size())];
}

double CssStage1(const CssAgent& agent, const FeedbackPolicy& policy, const PlayOptions& options,
                 Rng& rng) {
  if (!Bernoulli(rng, agent.coordination_p)) return 0.0;
  return SelectPositive(agent.selector, policy, options, rng);
}

double CssTotal(const FeedbackPolicy& policy, double b1, const Signal& signal,
                const PlayOptions& options, Rng& rng) {
  const MixedTotalBid law = CssStage2Law(policy, b1, signal);
  const double total = options.bid_step > 0.0
                           ? MomentMatchedLattice(law, options.bid_step).Sample(rng)
                           : SampleTotal(law, rng);
  return Clamp(total, b1, options.budget);
}

class Accumulator {
 public:
  explicit Accumulator(const BatchOptions& options) : options_(options) {}

  void Add(const GamePlay& game) {
    ++n_;
    const double profit = game.outcome.profit;
    // Welford update for the profit variance.
    const double delta = profit - mean_profit_;
    mean_profit_ += delta / static_cast<double>(n_);
    m2_profit_ += delta * (profit - mean_profit_);
    for (int i = 0; i < 2; ++i) {
      payoff_sum_[i] += game.outcome.payoffs[i];
      total_sum_[i] += game.outcome.totals[i];
      stage1_.push_back(game.players[i].b1);
      stage2_.push_back(game.players[i].b2);
      total_.push_back(game.outcome.totals[i]);
    }
    if (options_.on_game) options_.on_game(game);
  }

  BatchSummary Finish() {
    BatchSummary s;
    s.n_games = n_;
    std::vector<double> grid = options_.cdf_grid;
    if (grid.empty()) {
      const long last = std::lround(options_.play.budget * 100.0);
      for (long k = 0; k <= last; ++k) grid.push_back(LatticePoint(k, 0.01));
    }
    s.cdf_stage1 = EmpiricalCdf(stage1_, grid);
    s.cdf_stage2 = EmpiricalCdf(stage2_, grid);
    s.cdf_total = EmpiricalCdf(total_, grid);
    if (n_ > 0) {
      const double n = static_cast<double>(n_);
      s.mean_profit = mean_profit_;
      s.sd_profit = n_ > 1 ? std::sqrt(m2_profit_ / (n - 1.0)) : 0.0;
      for (int i = 0; i < 2; ++i) {
        s.mean_payoffs[i] = payoff_sum_[i] / n;
        s.mean_totals[i] = total_sum_[i] / n;
      }
    }
    if (options_.keep_samples) {
      s.stage1_samples = std::move(stage1_);
      s.stage2_samples = std::move(stage2_);
      s.total_samples = std::move(total_);
    }
    return s;
  }

 private:
  const BatchOptions& options_;
  long n_ = 0;
  double mean_profit_ = 0.0;
  double m2_profit_ = 0.0;
  std::array<double, 2> payoff_sum_{};
  std::array<double, 2> total_sum_{};
  std::vector<double> stage1_, stage2_, total_;
};

GamePlay Finish(const FeedbackPolicy& policy, std::array<double, 2> bids,
                const std::array<Signal, 2>& signals, std::array<double, 2> totals,
                const PlayOptions& options, Rng& rng) {
  GamePlay game;
  for (int i = 0; i < 2; ++i) {
    game.players[i].b1 = bids[i];
    game.players[i].b2 = OnLatticeOrRaw(totals[i] - bids[i], options);
    game.players[i].received = signals[i];
    if (options.bid_step > 0.0) totals[i] = SnapToLattice(totals[i], options.bid_step);
  }
  (void)policy;
  game.outcome = RealizedPayoffs(totals[0], totals[1], rng);
  return game;
}

}  // namespace

double ChooseStage1(const AgentSpec& agent, const FeedbackPolicy& policy,
                    const PlayOptions& options, Rng& rng) {
  if (const auto* css = std::get_if<CssAgent>(&agent)) {
    return CssStage1(*css, policy, options, rng);
  }
  if (const auto* sunk = std::get_if<SunkCostAgent>(&agent)) {
    return CssStage1(sunk->base, policy, options, rng);
  }
  const auto& noise = std::get<NoiseAgent>(agent);
  return OnLatticeOrRaw(Clamp(SampleTotal(noise.stage1_law, rng), 0.0, options.budget), options);
}

double ChooseTotal(const AgentSpec& agent, const FeedbackPolicy& policy, double b1,
                   const Signal& signal, const PlayOptions& options, Rng& rng) {
  if (std::holds_alternative<CssAgent>(agent)) {
    return CssTotal(policy, b1, signal, options, rng);
  }
  if (const auto* sunk = std::get_if<SunkCostAgent>(&agent)) {
    const double css = CssTotal(policy, b1, signal, options, rng);
    const double sunk_cost = std::min(b1, CheapestBid(policy, signal, b1));
    return Clamp(OnLatticeOrRaw(css + sunk->lambda * sunk_cost, options), b1, options.budget);
  }
  const auto& noise = std::get<NoiseAgent>(agent);
  const double extra = SampleTotal(noise.stage2_law, rng);
  return Clamp(OnLatticeOrRaw(b1 + extra, options), b1, options.budget);
}

GamePlay PlayGame(const FeedbackPolicy& policy, const AgentSpec& agent_1,
                  const AgentSpec& agent_2, Rng& rng, const PlayOptions& options) {
  const std::array<double, 2> bids = {ChooseStage1(agent_1, policy, options, rng),
                                      ChooseStage1(agent_2, policy, options, rng)};
  const auto signals = ExchangeSignals(policy, bids[0], bids[1], rng);
  const std::array<double, 2> totals = {
      ChooseTotal(agent_1, policy, bids[0], signals[0], options, rng),
      ChooseTotal(agent_2, policy, bids[1], signals[1], options, rng)};
  return Finish(policy, bids, signals, totals, options, rng);
}

GamePlay PlayCssStage2(const FeedbackPolicy& policy, std::array<double, 2> stage1_bids, Rng& rng,
                       const PlayOptions& options) {
  const auto signals = ExchangeSignals(policy, stage1_bids[0], stage1_bids[1], rng);
  const std::array<double, 2> totals = {
      CssTotal(policy, stage1_bids[0], signals[0], options, rng),
      CssTotal(policy, stage1_bids[1], signals[1], options, rng)};
  return Finish(policy, stage1_bids, signals, totals, options, rng);
}

std::array<BidRecord, 2> ToBidRecords(const GamePlay& game, int session, int round,
                                      const std::string& phase, const std::string& treatment,
                                      std::array<int, 2> subjects) {
  std::array<BidRecord, 2> rows;
  for (int i = 0; i < 2; ++i) {
    BidRecord& r = rows[i];
    r.session = session;
    r.round = round;
    r.phase = phase;
    r.treatment = treatment;
    r.subject = subjects[i];
    r.opponent = subjects[1 - i];
    r.b1_raw = ToDirhams(game.players[i].b1);
    r.b2_raw = ToDirhams(game.players[i].b2);
    r.signal = FormatSignal(game.players[i].received);
    r.won = game.outcome.winner == i + 1;
    r.final_balance = kBalanceDirhams + (r.won ? kDirhamsPerPrize : 0) - r.total_raw();
  }
  return rows;
}

std::vector<std::pair<double, double>> EmpiricalCdf(std::vector<double> values,
                                                    const std::vector<double>& grid) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double x : grid) {
    const double f =
        values.empty()
            ? 0.0
            : static_cast<double>(std::upper_bound(values.begin(), values.end(), x) -
                                  values.begin()) /
                  static_cast<double>(values.size());
    out.emplace_back(x, f);
  }
  return out;
}

double SupDistance(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

BatchSummary RunBatch(const FeedbackPolicy& policy, const CseProfile& profile, long n_games,
                      Rng& rng, const BatchOptions& options) {
  Accumulator acc(options);
  const auto bids = profile.Stage1Bids();
  for (long g = 0; g < n_games; ++g) acc.Add(PlayCssStage2(policy, bids, rng, options.play));
  return acc.Finish();
}

BatchSummary RunAgentBatch(const FeedbackPolicy& policy, const AgentSpec& agent_1,
                           const AgentSpec& agent_2, long n_games, Rng& rng,
                           const BatchOptions& options) {
  Accumulator acc(options);
  for (long g = 0; g < n_games; ++g) {
    acc.Add(PlayGame(policy, agent_1, agent_2, rng, options.play));
  }
  return acc.Finish();
}

int ExperimentConfig::SubjectsIn(int session_index) const {
  if (subjects_per_session.size() == 1) return subjects_per_session[0];
  return subjects_per_session.at(static_cast<std::size_t>(session_index));
}

int ExperimentConfig::TotalSubjects() const {
  int total = 0;
  for (int s = 0; s < n_sessions; ++s) total += SubjectsIn(s);
  return total;
}

SessionPlan PlanSessions(const ExperimentConfig& config, Rng& rng) {
  const int t = static_cast<int>(config.treatments.size());
  if (t == 0) throw UnbalancedConfig("no treatments");
  for (const std::string& label : config.treatments) {
    if (!IsValidTreatment(label) || label == "NONE") {
      throw UnbalancedConfig("invalid treatment '" + label + "'");
    }
  }
  // Fewer sessions than treatments take distinct rows of one Latin square.
  const bool partial = config.n_sessions < t;
  if (config.n_sessions <= 0 || (!partial && config.n_sessions % t != 0)) {
    throw UnbalancedConfig(std::to_string(config.n_sessions) +
                           " sessions cannot balance " + std::to_string(t) + " treatments");
  }
  if (config.subjects_per_session.size() != 1 &&
      config.subjects_per_session.size() != static_cast<std::size_t>(config.n_sessions)) {
    throw UnbalancedConfig("subjects_per_session needs 1 or n_sessions entries");
  }
  for (int s = 0; s < config.n_sessions; ++s) {
    const int n = config.SubjectsIn(s);
    if (n < 2 || n % 2 != 0) {
      throw UnbalancedConfig("session " + std::to_string(s + 1) + " has " + std::to_string(n) +
                             " subjects; pairwise matching needs an even number");
    }
  }
  if (config.rounds_per_treatment < 0 || config.practice_rounds < 0) {
    throw UnbalancedConfig("negative round count");
  }

  SessionPlan plan;
  if (!config.treatment_orders.empty()) {
    if (config.treatment_orders.size() != static_cast<std::size_t>(config.n_sessions)) {
      throw UnbalancedConfig("treatment_orders needs one order per session");
    }
    std::vector<std::string> sorted_treatments = config.treatments;
    std::sort(sorted_treatments.begin(), sorted_treatments.end());
    for (int pos = 0; pos < t; ++pos) {
      for (const std::string& label : config.treatments) {
        int count = 0;
        for (const auto& order : config.treatment_orders) {
          std::vector<std::string> sorted_order = order;
          std::sort(sorted_order.begin(), sorted_order.end());
          if (sorted_order != sorted_treatments) {
            throw UnbalancedConfig("a treatment order is not a permutation of the treatments");
          }
          count += order[pos] == label ? 1 : 0;
        }
        if (partial ? count > 1 : count != config.n_sessions / t) {
          throw UnbalancedConfig("treatment " + label + " appears " + std::to_string(count) +
                                 " times in position " + std::to_string(pos + 1));
        }
      }
    }
    plan.orders = config.treatment_orders;
  } else {
    // Each block of t sessions is a Latin square with randomly permuted
    // rows, columns and symbols.
    const int blocks = partial ? 1 : config.n_sessions / t;
    for (int block = 0; block < blocks; ++block) {
      std::vector<int> rows(t), cols(t), symbols(t);
      std::iota(rows.begin(), rows.end(), 0);
      std::iota(cols.begin(), cols.end(), 0);
      std::iota(symbols.begin(), symbols.end(), 0);
      Shuffle(rows, rng);
      Shuffle(cols, rng);
      Shuffle(symbols, rng);
      for (int r = 0; r < (partial ? config.n_sessions : t); ++r) {
        std::vector<std::string> order(t);
        for (int c = 0; c < t; ++c) order[c] = config.treatments[symbols[(rows[r] + cols[c]) % t]];
        plan.orders.push_back(std::move(order));
      }
    }
  }

  const int rounds = config.practice_rounds + t * config.rounds_per_treatment;
  plan.matchings.resize(config.n_sessions);
  for (int s = 0; s < config.n_sessions; ++s) {
    const int n = config.SubjectsIn(s);
    for (int r = 0; r < rounds; ++r) {
      std::vector<int> ids(n);
      std::iota(ids.begin(), ids.end(), 0);
      Shuffle(ids, rng);
      std::vector<std::pair<int, int>> pairs;
      for (int k = 0; k < n; k += 2) pairs.emplace_back(ids[k], ids[k + 1]);
      plan.matchings[s].push_back(std::move(pairs));
    }
  }
  return plan;
}

std::vector<BidRecord> RunExperiment(const ExperimentConfig& config,
                                     const std::vector<AgentMixEntry>& agent_pool, Rng& rng) {
  const double dirhams_per_step = config.bid_step * kDirhamsPerPrize;
  if (!(config.bid_step > 0.0) || std::abs(dirhams_per_step - std::round(dirhams_per_step)) > 1e-9) {
    throw UnbalancedConfig("bid_step must be a whole number of dirhams");
  }
  if (config.budget > kBudget) throw UnbalancedConfig("budget above the 40-dirham balance");
  double total_weight = 0.0;
  for (const AgentMixEntry& e : agent_pool) {
    if (e.weight < 0.0) throw UnbalancedConfig("negative agent weight");
    total_weight += e.weight;
  }
  if (!agent_pool.empty() && total_weight <= 0.0) throw UnbalancedConfig("agent weights sum to 0");

  std::vector<AgentSpec> agents;
  const int total_subjects = config.TotalSubjects();
  for (int i = 0; i < total_subjects; ++i) {
    if (agent_pool.empty()) {
      agents.emplace_back(CssAgent{});
      continue;
    }
    double u = Uniform01(rng) * total_weight;
    std::size_t pick = agent_pool.size() - 1;
    for (std::size_t k = 0; k < agent_pool.size(); ++k) {
      if (u < agent_pool[k].weight) {
        pick = k;
        break;
      }
      u -= agent_pool[k].weight;
    }
    agents.push_back(agent_pool[pick].agent);
  }

  const SessionPlan plan = PlanSessions(config, rng);
  PlayOptions options;
  options.bid_step = config.bid_step;
  options.budget = config.budget;

  std::vector<BidRecord> records;
  int subject_offset = 0;
  for (int s = 0; s < config.n_sessions; ++s) {
    int round = 0;
    auto play_round = [&](const std::string& treatment, const std::string& phase) {
      const FeedbackPolicy policy = PolicyForTreatment(treatment);
      std::vector<BidRecord> rows;
      for (const auto& [a, b] : plan.matchings[s][round]) {
        const GamePlay game = PlayGame(policy, agents[subject_offset + a],
                                       agents[subject_offset + b], rng, options);
        for (const BidRecord& r : ToBidRecords(game, s + 1, round + 1, phase, treatment,
                                               {subject_offset + a + 1, subject_offset + b + 1})) {
          rows.push_back(r);
        }
      }
      std::sort(rows.begin(), rows.end(),
                [](const BidRecord& x, const BidRecord& y) { return x.subject < y.subject; });
      records.insert(records.end(), rows.begin(), rows.end());
      ++round;
    };
    for (int r = 0; r < config.practice_rounds; ++r) play_round("NONE", "practice");
    for (const std::string& treatment : plan.orders[s]) {
      for (int r = 0; r < config.rounds_per_treatment; ++r) play_round(treatment, "main");
    }
    subject_offset += config.SubjectsIn(s);
  }
  return records;
}

}  // namespace contestlab
