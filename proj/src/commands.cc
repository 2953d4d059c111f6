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

#include "contestlab/commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "contestlab/analysis.h"
#include "contestlab/errors.h"
#include "contestlab/policy_spec.h"
#include "contestlab/verifier.h"
#include "json.hpp"

namespace contestlab {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double ParseReal(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double v = 0.0;
  if (text.empty() || !(in >> v) || !in.eof() || !std::isfinite(v)) {
    throw ParseError("bad " + what + " '" + text + "'");
  }
  return v;
}

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

CellSelector ParseSelector(const std::string& text) {
  CellSelector s;
  if (text == "zero") {
    s.kind = CellSelector::Kind::kZero;
  } else if (text == "highest") {
    s.kind = CellSelector::Kind::kHighest;
  } else if (text == "uniform") {
    s.kind = CellSelector::Kind::kUniformPositive;
  } else if (text.rfind("fixed=", 0) == 0) {
    s.kind = CellSelector::Kind::kFixed;
    s.target = ParseReal(text.substr(6), "selector target");
  } else {
    throw ParseError("unknown selector '" + text + "'");
  }
  return s;
}

double Probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParseError(what + " must be in [0,1]");
  return p;
}

// Seed order: flag, then config, then CONTESTLAB_SEED, then 0.
std::pair<std::uint64_t, bool> ResolveSeed(const CLI::Option* flag, std::uint64_t flag_value,
                                           std::optional<std::uint64_t> config_value) {
  if (flag->count() > 0) return {flag_value, false};
  if (config_value) return {*config_value, false};
  if (const char* env = std::getenv("CONTESTLAB_SEED"); env != nullptr && *env != '\0') {
    const std::string text = env;
    if (text.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError("CONTESTLAB_SEED must be a non-negative integer, got '" + text + "'");
    }
    try {
      return {std::stoull(text), false};
    } catch (const std::exception&) {
      throw ParseError("CONTESTLAB_SEED out of range");
    }
  }
  return {0, true};
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string Sig3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string Fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : std::string(width - s.size(), ' ') + s;
}

ordered_json ToJson(const ResponseGap& g) {
  return {{"gap", g.gap},
          {"best_point", g.best_point},
          {"best_value", g.best_value},
          {"worst_candidate", g.worst_candidate},
          {"worst_value", g.worst_value}};
}

ordered_json ToJson(const Stage2Report& r) {
  return {{"stage1_bids", r.stage1_bids},
          {"gaps", {ToJson(r.gaps[0]), ToJson(r.gaps[1])}},
          {"passed", r.passed}};
}

ordered_json ToJson(const Stage1Report& r) {
  ordered_json players = ordered_json::array();
  for (const PlayerDeviationReport& p : r.players) {
    ordered_json j = {{"on_path_value", p.on_path_value},
                      {"best_deviation", p.best_deviation},
                      {"best_value", p.best_value},
                      {"gap", p.gap}};
    j["formula_discrepancy"] =
        p.formula_discrepancy ? ordered_json(*p.formula_discrepancy) : ordered_json(nullptr);
    players.push_back(j);
  }
  ordered_json j = {{"stage1_bids", r.stage1_bids},
                    {"players", players},
                    {"deviation_gain", r.deviation_gain},
                    {"passed", r.passed}};
  if (r.deviation_bound_holds) j["deviation_bound_holds"] = *r.deviation_bound_holds;
  return j;
}

ordered_json ToJson(const TTestResult& t) {
  ordered_json j = {{"t", t.statistic}, {"df", t.degrees_of_freedom}, {"p", t.p_value}};
  j["means"] = t.means;
  j["ci_lower"] = t.ci_lower;
  j["ci_upper"] = t.ci_upper;
  return j;
}

ordered_json ToJson(const RegressionTable& table) {
  ordered_json cols = ordered_json::array();
  for (const RegressionColumn& c : table.columns) {
    ordered_json j = {{"label", c.label}, {"treatments", c.treatments},
                      {"subset", SubsetName(c.subset)}};
    if (c.fit) {
      ordered_json coef = ordered_json::object();
      for (std::size_t k = 0; k < c.fit->names.size(); ++k) {
        coef[c.fit->names[k]] = {{"estimate", c.fit->coefficients[k]},
                                 {"se", c.fit->standard_errors[k]}};
      }
      j["coefficients"] = coef;
      j["n_obs"] = c.fit->n_obs;
      j["r_squared"] = c.fit->r_squared;
      j["clustered"] = c.fit->clustered;
    } else {
      j["error"] = c.error;
    }
    cols.push_back(j);
  }
  return {{"name", table.name}, {"outcome", OutcomeName(table.outcome)}, {"columns", cols}};
}

std::string RegressionText(const std::string& title, const RegressionTable& table) {
  std::ostringstream s;
  constexpr std::size_t kW = 22;
  s << title << " (" << table.name << ")\n" << Pad("", 14);
  for (const RegressionColumn& c : table.columns) s << Pad(c.label, kW);
  s << "\n";
  const std::vector<std::string> order = {"Sunk Cost", "Head Start", "Head Start^2", "Constant"};
  for (const std::string& name : order) {
    std::ostringstream est, se;
    est << std::string(14 - std::min<std::size_t>(14, name.size()), ' ') << name;
    se << Pad("", 14);
    for (const RegressionColumn& c : table.columns) {
      if (c.fit) {
        const std::size_t k = c.fit->IndexOf(name);
        est << Pad(Fixed(c.fit->coefficients[k], 3), kW);
        se << Pad("(" + Fixed(c.fit->standard_errors[k], 3) + ")", kW);
      } else {
        est << Pad("n/a", kW);
        se << Pad("", kW);
      }
    }
    s << est.str() << "\n" << se.str() << "\n";
  }
  s << Pad("Observations", 14);
  for (const RegressionColumn& c : table.columns) {
    s << Pad(c.fit ? std::to_string(c.fit->n_obs) : "n/a", kW);
  }
  s << "\n" << Pad("R^2", 14);
  for (const RegressionColumn& c : table.columns) {
    s << Pad(c.fit ? Fixed(c.fit->r_squared, 3) : "n/a", kW);
  }
  s << "\n";
  return s.str();
}

std::string BatteryText(const BatteryReport& r) {
  std::ostringstream s;
  s << "H1 same profit: t statistic (p-value)\n" << Pad("", 6);
  for (std::size_t j = 1; j < r.treatments.size(); ++j) s << Pad(r.treatments[j], 16);
  s << "\n";
  for (std::size_t i = 0; i + 1 < r.treatments.size(); ++i) {
    std::ostringstream t_line, p_line;
    t_line << Pad(r.treatments[i], 6);
    p_line << Pad("", 6);
    for (std::size_t j = 1; j < r.treatments.size(); ++j) {
      if (j <= i) {
        t_line << Pad(".", 16);
        p_line << Pad("", 16);
        continue;
      }
      const auto it = std::find_if(r.h1.begin(), r.h1.end(), [&](const PairwiseTest& p) {
        return p.a == r.treatments[i] && p.b == r.treatments[j];
      });
      if (it != r.h1.end() && it->result) {
        t_line << Pad(Fixed(it->result->statistic, 3), 16);
        p_line << Pad("(" + Sig3(it->result->p_value) + ")", 16);
      } else {
        t_line << Pad("n/a", 16);
        p_line << Pad("", 16);
      }
    }
    s << t_line.str() << "\n" << p_line.str() << "\n";
  }
  s << "\nH2 zero profit\n"
    << Pad("Treatment", 10) << Pad("N", 8) << Pad("Mean", 10) << Pad("CI Lower", 10)
    << Pad("CI Upper", 10) << Pad("t", 10) << Pad("p", 12) << "\n";
  for (const OneSampleTest& o : r.h2) {
    s << Pad(o.treatment, 10) << Pad(std::to_string(o.n_obs), 8);
    if (o.result) {
      s << Pad(Fixed(o.result->means[0], 3), 10) << Pad(Fixed(o.result->ci_lower, 3), 10)
        << Pad(Fixed(o.result->ci_upper, 3), 10) << Pad(Fixed(o.result->statistic, 2), 10)
        << Pad(Sig3(o.result->p_value), 12);
    } else {
      s << Pad("n/a", 10);
    }
    s << "\n";
  }
  s << "\n" << RegressionText("H3", r.h3) << "\n" << RegressionText("H4", r.h4) << "\n"
    << RegressionText("H5", r.h5);
  return s.str();
}

MixedTotalBid LawFromJson(const json& j) {
  if (!j.is_object()) throw SchemaError("a bid law must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "atom_at" && key != "atom_prob" && key != "lo" && key != "hi") {
      throw SchemaError("unknown bid law key '" + key + "'");
    }
    if (!value.is_number()) throw SchemaError("bid law key '" + key + "' must be a number");
  }
  MixedTotalBid d;
  d.atom_at = j.value("atom_at", 0.0);
  d.atom_prob = j.value("atom_prob", 0.0);
  d.cont_prob = 1.0 - d.atom_prob;
  if (!(d.atom_prob >= 0.0 && d.atom_prob <= 1.0)) throw SchemaError("atom_prob outside [0,1]");
  if (d.cont_prob > 0.0) {
    if (!j.contains("lo") || !j.contains("hi")) throw SchemaError("bid law needs lo and hi");
    d.cont_lo = j["lo"].get<double>();
    d.cont_hi = j["hi"].get<double>();
    if (!(d.cont_lo >= 0.0 && d.cont_lo < d.cont_hi)) throw SchemaError("bid law needs 0 <= lo < hi");
  } else {
    d.cont_lo = d.cont_hi = d.atom_at;
  }
  if (d.atom_at < 0.0) throw SchemaError("atom_at must be non-negative");
  return d;
}

AgentSpec AgentFromJson(const json& j) {
  if (!j.is_object()) throw SchemaError("an agent must be an object");
  static const std::set<std::string> kKeys = {"weight", "type",   "spec",   "coordination_p",
                                              "selector", "lambda", "stage1", "stage2"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw SchemaError("unknown agent key '" + key + "'");
  }
  try {
    if (j.contains("spec")) return ParseAgentSpec(j["spec"].get<std::string>());
    const std::string type = j.value("type", std::string("css"));
    CssAgent css;
    css.coordination_p = Probability(j.value("coordination_p", 0.0), "coordination_p");
    css.selector = ParseSelector(j.value("selector", std::string("zero")));
    if (type == "css") return css;
    if (type == "sunk") return SunkCostAgent{j.value("lambda", 0.0), css};
    if (type == "noise") {
      NoiseAgent n;
      n.stage1_law = LawFromJson(j.value("stage1", json{{"lo", 0.0}, {"hi", 1.0}}));
      n.stage2_law = LawFromJson(j.value("stage2", json{{"lo", 0.0}, {"hi", 1.0}}));
      return n;
    }
    throw SchemaError("unknown agent type '" + type + "'");
  } catch (const ParseError& e) {
    throw SchemaError(e.what());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("agent: ") + e.what());
  }
}

// ---- subcommands -------------------------------------------------------

struct PredictArgs {
  std::string b1;
  std::string ubar_s;
};

int CmdPredict(const PredictArgs& a, std::ostream& out) {
  const double b1 = ParseReal(a.b1, "--b1");
  const double ubar = ParseReal(a.ubar_s, "--ubar-s");
  if (b1 < 0.0 || b1 > 1.0) throw ParseError("--b1 must be in [0,1]");
  if (ubar < 0.0 || ubar > 1.0) throw ParseError("--ubar-s must be in [0,1]");
  const CssPrediction p = CssPredictions(b1, ubar);
  ordered_json j = {{"p_exceed", p.p_exceed_prize},
                    {"p_dropout", p.p_dropout},
                    {"mean_b2", p.mean_stage2}};
  out << j.dump() << "\n";
  return 0;
}

struct SimulateArgs {
  std::string policy = "none";
  long games = 1000;
  std::uint64_t seed = 0;
  CLI::Option* seed_flag = nullptr;
  int zero_bidder = 1;
  double other_bid = 0.0;
  std::string agent1;
  std::string agent2;
  double bid_step = 0.05;
  std::string out;
  std::string summary;
};

int CmdSimulate(const SimulateArgs& a, std::ostream& out) {
  const FeedbackPolicy policy = ParsePolicySpec(a.policy);
  if (a.games < 0) throw ParseError("--games must be non-negative");
  if (a.bid_step < 0.0 || a.bid_step > 1.0) throw ParseError("--bid-step must be in [0,1]");
  const auto [seed, defaulted] = ResolveSeed(a.seed_flag, a.seed, std::nullopt);

  const bool agents = !a.agent1.empty() || !a.agent2.empty();
  CseProfile profile;
  profile.policy = policy;
  if (!agents) {
    if (a.zero_bidder != 1 && a.zero_bidder != 2) throw ParseError("--zero-bidder must be 1 or 2");
    if (a.other_bid < 0.0 || a.other_bid > 1.0) throw ParseError("--other-bid must be in [0,1]");
    if (policy.kind() == PolicyKind::kRank && a.other_bid != 0.0) {
      throw ParseError("the only rank profile is (0, 0)");
    }
    if (policy.is_partition() && policy.CellInfimum(a.other_bid) != a.other_bid) {
      throw ParseError("--other-bid " + FormatNumber(a.other_bid) + " is not a cell infimum of " +
                       policy.Describe());
    }
    if (a.bid_step > 0.0 && std::abs(SnapToLattice(a.other_bid, a.bid_step) - a.other_bid) > 1e-9) {
      throw ParseError("--other-bid is not a multiple of --bid-step");
    }
    profile.zero_bidder = a.zero_bidder;
    profile.other_bid = a.other_bid;
  }

  std::optional<std::ofstream> csv;
  std::string treatment;
  if (!a.out.empty()) {
    treatment = TreatmentForPolicy(policy);
    if (treatment.empty()) {
      throw ParseError("policy " + policy.Describe() + " has no treatment label for the CSV");
    }
    const double dirhams = a.bid_step * kDirhamsPerPrize;
    if (a.bid_step <= 0.0 || std::abs(dirhams - std::round(dirhams)) > 1e-9) {
      throw ParseError("CSV output needs --bid-step a whole number of dirhams (k/20)");
    }
    csv.emplace(OpenOut(a.out));
    WriteCsvHeader(*csv);
  }

  BatchOptions options;
  options.play.bid_step = a.bid_step;
  long round = 0;
  if (csv) {
    options.on_game = [&](const GamePlay& game) {
      ++round;
      for (const BidRecord& r : ToBidRecords(game, 1, static_cast<int>(round), "main", treatment,
                                             {1, 2})) {
        WriteCsvRow(*csv, r);
      }
    };
  }
  Rng rng(seed);
  const BatchSummary s =
      agents ? RunAgentBatch(policy, ParseAgentSpec(a.agent1.empty() ? "css" : a.agent1),
                             ParseAgentSpec(a.agent2.empty() ? "css" : a.agent2), a.games, rng,
                             options)
             : RunBatch(policy, profile, a.games, rng, options);

  ordered_json j = {{"command", "simulate"},
                    {"policy", policy.Describe()},
                    {"games", s.n_games},
                    {"seed", seed},
                    {"seed_defaulted", defaulted},
                    {"bid_step", a.bid_step}};
  if (agents) {
    j["agents"] = {a.agent1.empty() ? "css" : a.agent1, a.agent2.empty() ? "css" : a.agent2};
  } else {
    j["stage1_bids"] = profile.Stage1Bids();
  }
  j["mean_profit"] = s.mean_profit;
  j["sd_profit"] = s.sd_profit;
  j["mean_payoffs"] = s.mean_payoffs;
  j["mean_totals"] = s.mean_totals;
  if (!a.summary.empty()) OpenOut(a.summary) << j.dump(2) << "\n";
  out << j.dump(2) << "\n";
  return 0;
}

struct VerifyArgs {
  std::string policy = "none";
  double step = 0.01;
  double epsilon = -1.0;
  double max_total = kBudget;
  double full_grid_step = 0.05;
  std::string out;
};

int CmdVerify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const FeedbackPolicy policy = ParsePolicySpec(a.policy);
  if (!(a.step > 0.0 && a.step <= 0.5)) throw ParseError("--step must be in (0, 0.5]");
  const double eps = a.epsilon < 0.0 ? 2.0 * a.step : a.epsilon;
  const Grid grid(a.step, a.max_total);
  const PolicyVerification v = VerifyPolicy(policy, grid, eps, a.full_grid_step);

  ordered_json sweep = ordered_json::array(), s2 = ordered_json::array(),
               s1 = ordered_json::array(), off = ordered_json::array();
  for (const auto& r : v.headstart_sweep) sweep.push_back(ToJson(r));
  for (const auto& r : v.cse_stage2) s2.push_back(ToJson(r));
  for (const auto& r : v.cse_stage1) s1.push_back(ToJson(r));
  for (const auto& r : v.rank_off_path) {
    off.push_back({{"stage1_bid", r.stage1_bid}, {"gap", ToJson(r.gap)}, {"passed", r.passed}});
  }
  ordered_json j = {{"command", "verify"},    {"policy", v.policy},
                    {"step", v.step},         {"epsilon", v.epsilon},
                    {"passed", v.passed},     {"headstart_sweep", sweep},
                    {"cse_stage2", s2},       {"cse_stage1", s1},
                    {"rank_off_path", off}};
  if (!a.out.empty()) OpenOut(a.out) << j.dump(2) << "\n";

  auto bids = [](const std::array<double, 2>& b) {
    return "(" + FormatNumber(b[0]) + ", " + FormatNumber(b[1]) + ")";
  };
  long failures = 0;
  for (const auto* group : {&v.headstart_sweep, &v.cse_stage2}) {
    for (const Stage2Report& r : *group) {
      if (r.passed) continue;
      ++failures;
      for (int i = 0; i < 2; ++i) {
        if (r.gaps[i].gap > eps) {
          err << "FAIL stage 2 " << bids(r.stage1_bids) << " player " << i + 1 << ": gap "
              << FormatNumber(r.gaps[i].gap) << " > " << FormatNumber(eps) << " at total "
              << FormatNumber(r.gaps[i].worst_candidate) << "\n";
        }
      }
    }
  }
  for (const Stage1Report& r : v.cse_stage1) {
    if (r.passed) continue;
    ++failures;
    for (int i = 0; i < 2; ++i) {
      const auto& p = r.players[i];
      err << "FAIL stage 1 " << bids(r.stage1_bids) << " player " << i + 1 << ": deviation to "
          << FormatNumber(p.best_deviation) << " gains " << FormatNumber(p.gap);
      if (p.formula_discrepancy) err << ", formula discrepancy " << FormatNumber(*p.formula_discrepancy);
      err << "\n";
    }
  }
  for (const OffPathReport& r : v.rank_off_path) {
    if (r.passed) continue;
    ++failures;
    err << "FAIL rank off-path stage-1 bid " << FormatNumber(r.stage1_bid) << ": gap "
        << FormatNumber(r.gap.gap) << "\n";
  }
  out << ordered_json{{"policy", v.policy},
                      {"step", v.step},
                      {"epsilon", v.epsilon},
                      {"headstart_cases", v.headstart_sweep.size()},
                      {"cse_profiles", v.cse_stage1.size()},
                      {"failures", failures},
                      {"passed", v.passed}}
             .dump(2)
      << "\n";
  return v.passed ? 0 : 1;
}

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string summary;
  std::uint64_t seed = 0;
  CLI::Option* seed_flag = nullptr;
};

int CmdExperiment(const ExperimentArgs& a, std::ostream& out) {
  ExperimentSetup setup = ParseExperimentConfig(ReadFile(a.config));
  const auto [seed, defaulted] = ResolveSeed(
      a.seed_flag, a.seed,
      setup.seed_given ? std::optional<std::uint64_t>(setup.config.seed) : std::nullopt);
  setup.config.seed = seed;
  Rng rng(seed);
  const std::vector<BidRecord> rows = RunExperiment(setup.config, setup.agents, rng);
  if (!a.out.empty()) {
    std::ofstream f = OpenOut(a.out);
    WriteCsv(f, rows);
  }
  long main_rows = 0;
  bool balanced = true;
  for (const BidRecord& r : rows) {
    main_rows += r.phase == "main" ? 1 : 0;
    balanced = balanced && r.BalanceIdentityHolds();
  }
  ordered_json j = {{"command", "experiment"},
                    {"seed", seed},
                    {"seed_defaulted", defaulted},
                    {"sessions", setup.config.n_sessions},
                    {"subjects", setup.config.TotalSubjects()},
                    {"rows", rows.size()},
                    {"main_rows", main_rows},
                    {"balance_identities_hold", balanced}};
  if (!a.summary.empty()) OpenOut(a.summary) << j.dump(2) << "\n";
  out << j.dump(2) << "\n";
  return 0;
}

struct AnalyzeArgs {
  std::string input;
  std::string out_dir = ".";
  std::string hypotheses = "h1,h2,h3,h4,h5";
  std::string unit = "per-game";
  bool pooled_variance = false;
  bool cluster = false;
};

int CmdAnalyze(const AnalyzeArgs& a, std::ostream& out) {
  std::set<std::string> wanted;
  for (const std::string& h : SplitOn(a.hypotheses, ',')) {
    if (h != "h1" && h != "h2" && h != "h3" && h != "h4" && h != "h5") {
      throw ParseError("unknown hypothesis '" + h + "'");
    }
    wanted.insert(h);
  }
  BatteryOptions options;
  if (a.unit == "per-game") {
    options.unit = ProfitUnit::kPerGame;
  } else if (a.unit == "per-subject") {
    options.unit = ProfitUnit::kPerSubjectMean;
  } else {
    throw ParseError("--unit must be per-game or per-subject");
  }
  options.pooled_variance = a.pooled_variance;
  options.cluster_by_subject = a.cluster;

  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + a.input);
  const std::vector<BidRecord> records = ReadCsv(in);
  const BatteryReport r = HypothesisBattery(records, options);

  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  const std::string unit = a.unit == "per-game" ? "per_game" : "per_subject_mean";
  if (wanted.count("h1")) {
    ordered_json pairs = ordered_json::array();
    for (const PairwiseTest& p : r.h1) {
      ordered_json j = {{"a", p.a}, {"b", p.b}};
      if (p.result) {
        j.update(ToJson(*p.result));
      } else {
        j["error"] = p.error;
      }
      pairs.push_back(j);
    }
    OpenOut((dir / "h1.json").string())
        << ordered_json{{"hypothesis", "same profit"},
                        {"test", a.pooled_variance ? "pooled" : "welch"},
                        {"unit", unit},
                        {"pairs", pairs}}
               .dump(2)
        << "\n";
  }
  if (wanted.count("h2")) {
    ordered_json rows = ordered_json::array();
    for (const OneSampleTest& o : r.h2) {
      ordered_json j = {{"treatment", o.treatment}, {"n", o.n_obs}};
      if (o.result) {
        j["mean"] = o.result->means[0];
        j.update(ToJson(*o.result));
        j.erase("means");
      } else {
        j["error"] = o.error;
      }
      rows.push_back(j);
    }
    OpenOut((dir / "h2.json").string())
        << ordered_json{{"hypothesis", "zero profit"}, {"unit", unit}, {"rows", rows}}.dump(2)
        << "\n";
  }
  const std::pair<const char*, const RegressionTable*> tables[] = {
      {"h3", &r.h3}, {"h4", &r.h4}, {"h5", &r.h5}};
  for (const auto& [name, table] : tables) {
    if (wanted.count(name)) {
      OpenOut((dir / (std::string(name) + ".json")).string()) << ToJson(*table).dump(2) << "\n";
    }
  }
  for (const std::string& t : r.treatments) {
    const CdfPoints c = TreatmentCdf(records, t);
    if (c.n_obs == 0) continue;
    std::ofstream f = OpenOut((dir / ("cdf_" + t + ".csv")).string());
    f << "x,stage1,stage2,total\n";
    for (std::size_t k = 0; k < c.x.size(); ++k) {
      f << FormatNumber(c.x[k]) << ',' << FormatNumber(c.stage1[k]) << ','
        << FormatNumber(c.stage2[k]) << ',' << FormatNumber(c.total[k]) << '\n';
    }
  }
  const std::string text = BatteryText(r);
  OpenOut((dir / "tables.txt").string()) << text;
  out << text;
  return 0;
}

}  // namespace

AgentSpec ParseAgentSpec(const std::string& text) {
  const std::vector<std::string> f = SplitOn(text, ':');
  auto css_from = [&](std::size_t first) {
    if (f.size() > first + 2) throw ParseError("too many fields in agent '" + text + "'");
    CssAgent a;
    if (f.size() > first) a.coordination_p = Probability(ParseReal(f[first], "probability"), "p");
    // A positive coordination probability with no selector picks uniformly.
    a.selector.kind = a.coordination_p > 0.0 ? CellSelector::Kind::kUniformPositive
                                             : CellSelector::Kind::kZero;
    if (f.size() > first + 1) a.selector = ParseSelector(f[first + 1]);
    return a;
  };
  if (f[0] == "css") return css_from(1);
  if (f[0] == "sunk") {
    if (f.size() < 2) throw ParseError("sunk agent needs a lambda");
    const double lambda = ParseReal(f[1], "lambda");
    return SunkCostAgent{lambda, css_from(2)};
  }
  if (f[0] == "noise" && f.size() == 1) {
    return NoiseAgent{MixedTotalBid::Uniform(0.0, 1.0), MixedTotalBid::Uniform(0.0, 1.0)};
  }
  throw ParseError("unknown agent '" + text + "'");
}

ExperimentSetup ParseExperimentConfig(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "n_sessions", "subjects_per_session", "rounds_per_treatment", "practice_rounds",
      "treatments", "treatment_orders",     "budget",               "bid_step",
      "seed",       "agents"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw SchemaError("unknown config key '" + key + "'");
  }
  ExperimentSetup s;
  ExperimentConfig& c = s.config;
  try {
    c.n_sessions = j.value("n_sessions", c.n_sessions);
    if (j.contains("subjects_per_session")) {
      const json& v = j["subjects_per_session"];
      c.subjects_per_session =
          v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
    }
    c.rounds_per_treatment = j.value("rounds_per_treatment", c.rounds_per_treatment);
    c.practice_rounds = j.value("practice_rounds", c.practice_rounds);
    c.treatments = j.value("treatments", c.treatments);
    c.treatment_orders = j.value("treatment_orders", c.treatment_orders);
    c.budget = j.value("budget", c.budget);
    c.bid_step = j.value("bid_step", c.bid_step);
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw SchemaError("seed must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
      s.seed_given = true;
    }
    if (j.contains("agents")) {
      if (!j["agents"].is_array()) throw SchemaError("agents must be an array");
      for (const json& a : j["agents"]) {
        AgentMixEntry e;
        e.weight = a.value("weight", 1.0);
        e.agent = AgentFromJson(a);
        s.agents.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return s;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage all-pay auction laboratory", "contestlab"};
  app.require_subcommand(1);

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "CSS predictions for a stage-1 bid and belief point");
  p->add_option("--b1", predict.b1, "own stage-1 bid in [0,1]")->required();
  p->add_option("--ubar-s", predict.ubar_s, "cheapest opponent bid for the signal")->required();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "play many games and summarize");
  s->add_option("--policy", sim.policy, "none | full | rank | cutoff:<c> | cells:...")
      ->capture_default_str();
  s->add_option("--games", sim.games)->capture_default_str();
  sim.seed_flag = s->add_option("--seed", sim.seed);
  s->add_option("--zero-bidder", sim.zero_bidder, "CSE profile: who bids 0 in stage 1")
      ->capture_default_str();
  s->add_option("--other-bid", sim.other_bid, "CSE profile: the other stage-1 bid")
      ->capture_default_str();
  s->add_option("--agent1", sim.agent1, "css[:p[:sel]] | sunk:<l>[:p[:sel]] | noise");
  s->add_option("--agent2", sim.agent2);
  s->add_option("--bid-step", sim.bid_step, "bid lattice, 0 for continuous bids")
      ->capture_default_str();
  s->add_option("--out", sim.out, "CSV of bid records");
  s->add_option("--summary", sim.summary, "summary JSON path");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "check the CSE against a discretized best response");
  v->add_option("--policy", ver.policy)->capture_default_str();
  v->add_option("--step", ver.step)->capture_default_str();
  v->add_option("--epsilon", ver.epsilon, "tolerance, default 2 * step");
  v->add_option("--max-total", ver.max_total)->capture_default_str();
  v->add_option("--full-grid-step", ver.full_grid_step)->capture_default_str();
  v->add_option("--out", ver.out, "full report JSON path");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "simulate a lab experiment");
  e->add_option("--config", exp.config)->required();
  e->add_option("--out", exp.out, "dataset CSV path");
  e->add_option("--summary", exp.summary);
  exp.seed_flag = e->add_option("--seed", exp.seed);

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "run the hypothesis battery on a dataset");
  a->add_option("--input", an.input)->required();
  a->add_option("--out-dir", an.out_dir)->capture_default_str();
  a->add_option("--hypotheses", an.hypotheses)->capture_default_str();
  a->add_option("--unit", an.unit, "per-game | per-subject")->capture_default_str();
  a->add_flag("--pooled-variance", an.pooled_variance);
  a->add_flag("--cluster", an.cluster, "subject-clustered standard errors");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << ex.what() << "\n";
    return ParseError("").exit_code();
  }

  try {
    if (*p) return CmdPredict(predict, out);
    if (*s) return CmdSimulate(sim, out);
    if (*v) return CmdVerify(ver, out, err);
    if (*e) return CmdExperiment(exp, out);
    if (*a) return CmdAnalyze(an, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return ex.exit_code();
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace contestlab
