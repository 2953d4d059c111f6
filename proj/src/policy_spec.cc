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

#include "contestlab/policy_spec.h"

#include <sstream>
#include <vector>

#include "contestlab/dataset.h"
#include "contestlab/errors.h"

namespace contestlab {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double Number(const std::string& text, const std::string& spec) {
  const std::string t = Trim(text);
  std::istringstream in(t);
  in.imbue(std::locale::classic());
  double v = 0.0;
  if (t.empty() || !(in >> v) || !in.eof()) {
    throw ParseError("bad number '" + t + "' in policy '" + spec + "'");
  }
  return v;
}

bool Flag(const std::string& text, const std::string& spec) {
  const std::string t = Trim(text);
  if (t == "1") return true;
  if (t == "0") return false;
  throw ParseError("closed flag must be 0 or 1, got '" + t + "' in policy '" + spec + "'");
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

FeedbackPolicy ParsePolicySpec(const std::string& raw) {
  const std::string spec = Trim(raw);
  if (spec == "none") return FeedbackPolicy::NoFeedback();
  if (spec == "full") return FeedbackPolicy::Full();
  if (spec == "rank") return FeedbackPolicy::Rank();
  if (spec.rfind("cutoff:", 0) == 0) return FeedbackPolicy::Cutoff(Number(spec.substr(7), spec));
  if (spec.rfind("cells:", 0) == 0) {
    std::vector<IntervalCell> cells;
    for (const std::string& part : Split(spec.substr(6), ';')) {
      const auto f = Split(part, ',');
      if (f.size() != 4) {
        throw ParseError("cell '" + part + "' needs lo,hi,lo_closed,hi_closed");
      }
      cells.push_back({Number(f[0], spec), Number(f[1], spec), Flag(f[2], spec), Flag(f[3], spec)});
    }
    return ValidatePolicy(cells);
  }
  if (IsValidTreatment(spec)) return PolicyForTreatment(spec);
  throw ParseError("unknown policy '" + raw + "'");
}

}  // namespace contestlab
