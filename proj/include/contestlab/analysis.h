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

#ifndef CONTESTLAB_ANALYSIS_H_
#define CONTESTLAB_ANALYSIS_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contestlab/dataset.h"
#include "contestlab/stats.h"

namespace contestlab {

enum class Outcome { kExceed, kDropout, kMean };
enum class Subset { kPooled, kLeader, kLaggard };

std::string OutcomeName(Outcome outcome);
std::string SubsetName(Subset subset);

struct RegressionRow {
  double y = 0.0;
  double sunk_cost = 0.0;   // min(b1, ubar_s)
  double head_start = 0.0;  // |b1 - ubar_s|
  double head_start_sq = 0.0;
  std::string treatment;
  bool is_leader = false;   // b1 >= ubar_s
  bool is_laggard = false;  // b1 <= ubar_s
  int subject = 0;
};

// Main-phase rows of the given treatments whose stage-1 bid is the
// infimum of its own cell (every Full row qualifies). Bids are normalized
// here. y is 1{total > 1}, 1{b2 = 0} or b2. Throws SchemaError on a signal
// that does not fit its treatment; Rank and NONE cannot be requested.
std::vector<RegressionRow> BuildRegressionRows(
    const std::vector<BidRecord>& records, Outcome outcome,
    const std::vector<std::string>& treatments = {"F", "C5", "C10"});

inline constexpr const char* kRegressorNames[] = {"Constant", "Sunk Cost", "Head Start",
                                                  "Head Start^2"};

// y on (1, sunk cost, head start, head start^2) over the chosen subset.
OlsFit FitRegression(const std::vector<RegressionRow>& rows, Subset subset,
                     bool cluster_by_subject = false);

enum class ProfitUnit {
  kPerGame,        // one value per game, each pair counted once
  kPerSubjectMean  // per subject, the mean profit of the games played
};

// Auctioneer profit (sum of both totals minus the prize, normalized) per
// main-phase observation of `treatment`. Throws SchemaError when a game's
// opponent row is missing.
std::vector<double> ProfitSample(const std::vector<BidRecord>& records,
                                 const std::string& treatment, ProfitUnit unit);

struct BatteryOptions {
  ProfitUnit unit = ProfitUnit::kPerGame;
  bool pooled_variance = false;
  bool cluster_by_subject = false;
};

// Cells that could not be computed keep their slot with `error` set, so
// every table keeps its shape.
struct PairwiseTest {
  std::string a;
  std::string b;
  std::optional<TTestResult> result;
  std::string error;
};

struct OneSampleTest {
  std::string treatment;
  long n_obs = 0;
  std::optional<TTestResult> result;
  std::string error;
};

struct RegressionColumn {
  std::string label;  // e.g. "F / Pooled"
  std::vector<std::string> treatments;
  Subset subset = Subset::kPooled;
  std::optional<OlsFit> fit;
  std::string error;
};

struct RegressionTable {
  std::string name;
  Outcome outcome = Outcome::kExceed;
  std::vector<RegressionColumn> columns;
};

struct BatteryReport {
  std::vector<std::string> treatments;  // F, R, C5, C10
  std::vector<PairwiseTest> h1;         // six pairs
  std::vector<OneSampleTest> h2;        // four treatments
  RegressionTable h3;                   // six columns
  RegressionTable h4;                   // six columns
  RegressionTable h5;                   // four columns
};

// Throws InsufficientData when no treatment has two main-phase games.
BatteryReport HypothesisBattery(const std::vector<BidRecord>& records,
                                const BatteryOptions& options = {});

struct CdfPoints {
  std::string treatment;
  long n_obs = 0;
  std::vector<double> x;
  std::vector<double> stage1;
  std::vector<double> stage2;
  std::vector<double> total;
};

// Empirical CDFs of normalized main-phase bids on 0, 0.05, ..., 2.
CdfPoints TreatmentCdf(const std::vector<BidRecord>& records, const std::string& treatment);

}  // namespace contestlab

#endif  // CONTESTLAB_ANALYSIS_H_
