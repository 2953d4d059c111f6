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

#include "contestlab/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "contestlab/errors.h"
#include "contestlab/simulator.h"

namespace contestlab {
namespace {

const std::vector<std::string> kLabTreatments = {"F", "R", "C5", "C10"};

double Normalized(int raw) { return raw / static_cast<double>(kDirhamsPerPrize); }

bool Keep(const RegressionRow& row, Subset subset) {
  switch (subset) {
    case Subset::kPooled:
      return true;
    case Subset::kLeader:
      return row.is_leader;
    case Subset::kLaggard:
      return row.is_laggard;
  }
  return false;
}

std::vector<BidRecord> MainRows(const std::vector<BidRecord>& records,
                                const std::string& treatment) {
  std::vector<BidRecord> out;
  for (const BidRecord& r : records) {
    if (r.phase == "main" && r.treatment == treatment) out.push_back(r);
  }
  return out;
}

RegressionColumn MakeColumn(const std::vector<BidRecord>& records, Outcome outcome,
                            const std::vector<std::string>& treatments, Subset subset,
                            const BatteryOptions& options) {
  RegressionColumn col;
  std::string group;
  for (const std::string& t : treatments) group += (group.empty() ? "" : ", ") + t;
  col.label = group + " / " + SubsetName(subset);
  col.treatments = treatments;
  col.subset = subset;
  try {
    const auto rows = BuildRegressionRows(records, outcome, treatments);
    col.fit = FitRegression(rows, subset, options.cluster_by_subject);
  } catch (const RankDeficient& e) {
    col.error = e.what();
  }
  return col;
}

RegressionTable MakeTable(const std::vector<BidRecord>& records, const std::string& name,
                          Outcome outcome, const std::vector<Subset>& subsets,
                          const BatteryOptions& options) {
  RegressionTable table;
  table.name = name;
  table.outcome = outcome;
  for (const auto& group : {std::vector<std::string>{"F"}, std::vector<std::string>{"F", "C5", "C10"}}) {
    for (Subset s : subsets) table.columns.push_back(MakeColumn(records, outcome, group, s, options));
  }
  return table;
}

}  // namespace

std::string OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kExceed:
      return "exceed";
    case Outcome::kDropout:
      return "dropout";
    case Outcome::kMean:
      return "mean";
  }
  return "";
}

std::string SubsetName(Subset subset) {
  switch (subset) {
    case Subset::kPooled:
      return "Pooled";
    case Subset::kLeader:
      return "Leader";
    case Subset::kLaggard:
      return "Laggard";
  }
  return "";
}

std::vector<RegressionRow> BuildRegressionRows(const std::vector<BidRecord>& records,
                                               Outcome outcome,
                                               const std::vector<std::string>& treatments) {
  std::map<std::string, FeedbackPolicy> policies;
  for (const std::string& t : treatments) {
    if (!IsValidTreatment(t) || t == "R" || t == "NONE") {
      throw std::invalid_argument("treatment '" + t + "' has no cheapest-bid regression");
    }
    policies.emplace(t, PolicyForTreatment(t));
  }
  std::vector<RegressionRow> rows;
  for (const BidRecord& r : records) {
    if (r.phase != "main") continue;
    const auto it = policies.find(r.treatment);
    if (it == policies.end()) continue;
    const FeedbackPolicy& policy = it->second;
    const double b1 = Normalized(r.b1_raw);
    if (policy.is_partition() && std::abs(policy.CellOf(b1).lo - b1) > 1e-12) continue;
    const Signal signal = ParseSignal(r.signal, policy);
    const double ubar = CheapestBid(policy, signal, b1);

    RegressionRow row;
    switch (outcome) {
      case Outcome::kExceed:
        row.y = r.total_raw() > kDirhamsPerPrize ? 1.0 : 0.0;
        break;
      case Outcome::kDropout:
        row.y = r.b2_raw == 0 ? 1.0 : 0.0;
        break;
      case Outcome::kMean:
        row.y = Normalized(r.b2_raw);
        break;
    }
    row.sunk_cost = std::min(b1, ubar);
    row.head_start = std::abs(b1 - ubar);
    row.head_start_sq = row.head_start * row.head_start;
    row.treatment = r.treatment;
    row.is_leader = b1 >= ubar;
    row.is_laggard = b1 <= ubar;
    row.subject = r.subject;
    rows.push_back(std::move(row));
  }
  return rows;
}

OlsFit FitRegression(const std::vector<RegressionRow>& rows, Subset subset,
                     bool cluster_by_subject) {
  std::vector<std::vector<double>> cols(4);
  std::vector<double> y;
  std::vector<long> clusters;
  for (const RegressionRow& r : rows) {
    if (!Keep(r, subset)) continue;
    cols[0].push_back(1.0);
    cols[1].push_back(r.sunk_cost);
    cols[2].push_back(r.head_start);
    cols[3].push_back(r.head_start_sq);
    y.push_back(r.y);
    clusters.push_back(r.subject);
  }
  std::vector<std::string> names(std::begin(kRegressorNames), std::end(kRegressorNames));
  if (cluster_by_subject) return FitOls(cols, y, std::move(names), clusters);
  return FitOls(cols, y, std::move(names));
}

std::vector<double> ProfitSample(const std::vector<BidRecord>& records,
                                 const std::string& treatment, ProfitUnit unit) {
  const std::vector<BidRecord> rows = MainRows(records, treatment);
  std::map<std::tuple<int, int, int>, const BidRecord*> index;
  for (const BidRecord& r : rows) index[{r.session, r.round, r.subject}] = &r;

  std::vector<double> per_game;
  std::map<std::pair<int, int>, std::pair<double, long>> per_subject;
  for (const BidRecord& r : rows) {
    const auto it = index.find({r.session, r.round, r.opponent});
    if (it == index.end() || it->second->opponent != r.subject) {
      throw SchemaError("session " + std::to_string(r.session) + " round " +
                        std::to_string(r.round) + ": no matching row for opponent " +
                        std::to_string(r.opponent) + " of subject " + std::to_string(r.subject));
    }
    const double profit = Normalized(r.total_raw() + it->second->total_raw()) - 1.0;
    if (r.subject < r.opponent) per_game.push_back(profit);
    auto& acc = per_subject[{r.session, r.subject}];
    acc.first += profit;
    acc.second += 1;
  }
  if (unit == ProfitUnit::kPerGame) return per_game;
  std::vector<double> out;
  for (const auto& [key, acc] : per_subject) out.push_back(acc.first / static_cast<double>(acc.second));
  return out;
}

BatteryReport HypothesisBattery(const std::vector<BidRecord>& records,
                                const BatteryOptions& options) {
  BatteryReport report;
  report.treatments = kLabTreatments;
  std::map<std::string, std::vector<double>> profits;
  bool any = false;
  for (const std::string& t : kLabTreatments) {
    profits[t] = ProfitSample(records, t, options.unit);
    any = any || profits[t].size() >= 2;
  }
  if (!any) throw InsufficientData("no treatment has two main-phase observations");

  for (std::size_t i = 0; i < kLabTreatments.size(); ++i) {
    for (std::size_t j = i + 1; j < kLabTreatments.size(); ++j) {
      PairwiseTest p;
      p.a = kLabTreatments[i];
      p.b = kLabTreatments[j];
      try {
        p.result = WelchTTest(profits[p.a], profits[p.b], options.pooled_variance);
      } catch (const DegenerateSample& e) {
        p.error = e.what();
      }
      report.h1.push_back(std::move(p));
    }
  }
  for (const std::string& t : kLabTreatments) {
    OneSampleTest o;
    o.treatment = t;
    o.n_obs = static_cast<long>(profits[t].size());
    try {
      o.result = OneSampleTTest(profits[t], 0.0);
    } catch (const DegenerateSample& e) {
      o.error = e.what();
    }
    report.h2.push_back(std::move(o));
  }
  const std::vector<Subset> all = {Subset::kPooled, Subset::kLeader, Subset::kLaggard};
  report.h3 = MakeTable(records, "Exceed prize value", Outcome::kExceed, all, options);
  report.h4 = MakeTable(records, "Zero stage 2 bid", Outcome::kDropout, all, options);
  report.h5 = MakeTable(records, "Mean stage 2 bid", Outcome::kMean,
                        {Subset::kLeader, Subset::kLaggard}, options);
  return report;
}

CdfPoints TreatmentCdf(const std::vector<BidRecord>& records, const std::string& treatment) {
  CdfPoints c;
  c.treatment = treatment;
  std::vector<double> s1, s2, tot;
  for (const BidRecord& r : MainRows(records, treatment)) {
    s1.push_back(Normalized(r.b1_raw));
    s2.push_back(Normalized(r.b2_raw));
    tot.push_back(Normalized(r.total_raw()));
  }
  c.n_obs = static_cast<long>(s1.size());
  for (long k = 0; k <= 40; ++k) c.x.push_back(LatticePoint(k, 0.05));
  for (const auto& [x, f] : EmpiricalCdf(s1, c.x)) c.stage1.push_back(f);
  for (const auto& [x, f] : EmpiricalCdf(s2, c.x)) c.stage2.push_back(f);
  for (const auto& [x, f] : EmpiricalCdf(tot, c.x)) c.total.push_back(f);
  return c;
}

}  // namespace contestlab
