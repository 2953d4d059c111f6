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

#ifndef CONTESTLAB_DATASET_H_
#define CONTESTLAB_DATASET_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "contestlab/core.h"

namespace contestlab {

// Treatment labels: NONE (practice), F, R, and C<k> for a cutoff at k
// dirhams (the lab used C5 and C10).
bool IsValidTreatment(const std::string& label);
FeedbackPolicy PolicyForTreatment(const std::string& label);
// Label of a policy, or "" when the policy has none (custom cells, or a
// cutoff that is not a whole number of dirhams).
std::string TreatmentForPolicy(const FeedbackPolicy& policy);

// One subject-round observation, in raw lab units (dirhams).
struct BidRecord {
  int session = 1;
  int round = 1;
  std::string phase = "main";  // "practice" or "main"
  std::string treatment = "NONE";
  int subject = 1;
  int opponent = 2;
  int b1_raw = 0;
  int b2_raw = 0;
  std::string signal;  // see FormatSignal
  bool won = false;
  int final_balance = 0;

  int total_raw() const { return b1_raw + b2_raw; }
  bool BalanceIdentityHolds() const {
    return b1_raw >= 0 && b2_raw >= 0 && total_raw() <= kBalanceDirhams &&
           final_balance == kBalanceDirhams + kDirhamsPerPrize * (won ? 1 : 0) - total_raw();
  }

  friend bool operator==(const BidRecord&, const BidRecord&) = default;
};

inline constexpr const char* kCsvHeader =
    "session,round,phase,treatment,subject,opponent,b1_raw,b2_raw,signal,won,final_balance";

// Compact signal strings in dirhams: "cell:lo,hi", "exact:x", "rank:lower",
// "rank:higher". The cell string keeps only the ends; the treatment's
// policy supplies open/closed flags.
std::string FormatSignal(const Signal& signal);
Signal ParseSignal(const std::string& text, const FeedbackPolicy& policy);

// Integer dirhams of a bid on the 1/20 lattice.
int ToDirhams(double bid);

void WriteCsvHeader(std::ostream& out);
void WriteCsvRow(std::ostream& out, const BidRecord& record);
void WriteCsv(std::ostream& out, const std::vector<BidRecord>& records);

// Parses and validates a dataset. Throws SchemaError on a wrong header,
// malformed field, unknown treatment or phase, or an empty file.
std::vector<BidRecord> ReadCsv(std::istream& in);

}  // namespace contestlab

#endif  // CONTESTLAB_DATASET_H_
