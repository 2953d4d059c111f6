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

#include "contestlab/dataset.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "contestlab/errors.h"

namespace contestlab {
namespace {

bool ParseInt(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool ParseDouble(const std::string& text, double& out) {
  if (text.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size();
}

// Splits one CSV line; fields may be double-quoted.
std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw SchemaError("unterminated quote in line: " + line);
  return fields;
}

}  // namespace

bool IsValidTreatment(const std::string& label) {
  if (label == "NONE" || label == "F" || label == "R") return true;
  if (label.size() < 2 || label[0] != 'C') return false;
  int k = 0;
  return ParseInt(std::string_view(label).substr(1), k) && k >= 1 && k <= kDirhamsPerPrize &&
         label == "C" + std::to_string(k);
}

FeedbackPolicy PolicyForTreatment(const std::string& label) {
  if (!IsValidTreatment(label)) throw SchemaError("unknown treatment '" + label + "'");
  if (label == "NONE") return FeedbackPolicy::NoFeedback();
  if (label == "F") return FeedbackPolicy::Full();
  if (label == "R") return FeedbackPolicy::Rank();
  return FeedbackPolicy::Cutoff(std::stoi(label.substr(1)) / static_cast<double>(kDirhamsPerPrize));
}

std::string TreatmentForPolicy(const FeedbackPolicy& policy) {
  switch (policy.kind()) {
    case PolicyKind::kFull:
      return "F";
    case PolicyKind::kRank:
      return "R";
    case PolicyKind::kPartition:
      break;
  }
  if (policy.IsNoFeedback()) return "NONE";
  if (auto c = policy.cutoff()) {
    const double dirhams = *c * kDirhamsPerPrize;
    const long k = std::lround(dirhams);
    if (static_cast<double>(k) == dirhams) return "C" + std::to_string(k);
  }
  return "";
}

int ToDirhams(double bid) { return static_cast<int>(std::lround(bid * kDirhamsPerPrize)); }

std::string FormatSignal(const Signal& signal) {
  struct Visitor {
    std::string operator()(const CellSignal& s) const {
      return "cell:" + FormatNumber(s.cell.lo * kDirhamsPerPrize) + "," +
             FormatNumber(s.cell.hi * kDirhamsPerPrize);
    }
    std::string operator()(const ExactBidSignal& s) const {
      return "exact:" + FormatNumber(s.bid * kDirhamsPerPrize);
    }
    std::string operator()(const RankSignal& s) const {
      return s.opponent_higher ? "rank:higher" : "rank:lower";
    }
  };
  return std::visit(Visitor{}, signal);
}

Signal ParseSignal(const std::string& text, const FeedbackPolicy& policy) {
  auto fail = [&]() -> Signal {
    throw SchemaError("signal '" + text + "' does not match policy " + policy.Describe());
  };
  if (text == "rank:lower" || text == "rank:higher") {
    if (policy.kind() != PolicyKind::kRank) return fail();
    return RankSignal{text == "rank:higher"};
  }
  if (text.rfind("exact:", 0) == 0) {
    double x = 0.0;
    if (policy.kind() != PolicyKind::kFull || !ParseDouble(text.substr(6), x)) return fail();
    return ExactBidSignal{x / kDirhamsPerPrize};
  }
  if (text.rfind("cell:", 0) == 0) {
    const std::string body = text.substr(5);
    const auto comma = body.find(',');
    double lo = 0.0, hi = 0.0;
    if (!policy.is_partition() || comma == std::string::npos ||
        !ParseDouble(body.substr(0, comma), lo) || !ParseDouble(body.substr(comma + 1), hi)) {
      return fail();
    }
    for (const IntervalCell& c : policy.cells()) {
      if (std::abs(c.lo * kDirhamsPerPrize - lo) < 1e-9 &&
          std::abs(c.hi * kDirhamsPerPrize - hi) < 1e-9) {
        return CellSignal{c};
      }
    }
  }
  return fail();
}

void WriteCsvHeader(std::ostream& out) { out << kCsvHeader << '\n'; }

void WriteCsvRow(std::ostream& out, const BidRecord& r) {
  out << r.session << ',' << r.round << ',' << r.phase << ',' << r.treatment << ',' << r.subject
      << ',' << r.opponent << ',' << r.b1_raw << ',' << r.b2_raw << ',';
  if (r.signal.find(',') != std::string::npos) {
    out << '"' << r.signal << '"';
  } else {
    out << r.signal;
  }
  out << ',' << (r.won ? 1 : 0) << ',' << r.final_balance << '\n';
}

void WriteCsv(std::ostream& out, const std::vector<BidRecord>& records) {
  WriteCsvHeader(out);
  for (const BidRecord& r : records) WriteCsvRow(out, r);
}

std::vector<BidRecord> ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw SchemaError("unexpected header: " + line);

  std::vector<BidRecord> records;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    const std::string where = " at line " + std::to_string(line_no);
    if (f.size() != 11) throw SchemaError("expected 11 fields" + where);
    BidRecord r;
    int won = 0;
    if (!ParseInt(f[0], r.session) || !ParseInt(f[1], r.round) || !ParseInt(f[4], r.subject) ||
        !ParseInt(f[5], r.opponent) || !ParseInt(f[6], r.b1_raw) || !ParseInt(f[7], r.b2_raw) ||
        !ParseInt(f[9], won) || !ParseInt(f[10], r.final_balance) || (won != 0 && won != 1)) {
      throw SchemaError("malformed numeric field" + where);
    }
    r.phase = f[2];
    r.treatment = f[3];
    r.signal = f[8];
    r.won = won == 1;
    if (r.phase != "practice" && r.phase != "main") throw SchemaError("bad phase" + where);
    if (!IsValidTreatment(r.treatment)) throw SchemaError("bad treatment" + where);
    if (r.b1_raw < 0 || r.b2_raw < 0 || r.total_raw() > kBalanceDirhams) {
      throw SchemaError("bids outside the balance" + where);
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace contestlab
