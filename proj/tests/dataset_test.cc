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

#include <gtest/gtest.h>

#include <sstream>

#include "contestlab/errors.h"
#include "contestlab/simulator.h"

namespace contestlab {
namespace {

std::string Csv(const std::string& body) { return std::string(kCsvHeader) + "\n" + body; }

std::vector<BidRecord> Read(const std::string& text) {
  std::istringstream in(text);
  return ReadCsv(in);
}

TEST(TreatmentTest, LabelsAndPolicies) {
  EXPECT_TRUE(IsValidTreatment("C5"));
  EXPECT_TRUE(IsValidTreatment("NONE"));
  EXPECT_FALSE(IsValidTreatment("C05"));
  EXPECT_FALSE(IsValidTreatment("C21"));
  EXPECT_FALSE(IsValidTreatment("X"));
  EXPECT_EQ(PolicyForTreatment("C5"), FeedbackPolicy::Cutoff(0.25));
  EXPECT_EQ(PolicyForTreatment("C10"), FeedbackPolicy::Cutoff(0.5));
  EXPECT_EQ(TreatmentForPolicy(FeedbackPolicy::Cutoff(0.25)), "C5");
  EXPECT_EQ(TreatmentForPolicy(FeedbackPolicy::Full()), "F");
  EXPECT_EQ(TreatmentForPolicy(FeedbackPolicy::Rank()), "R");
  EXPECT_EQ(TreatmentForPolicy(FeedbackPolicy::NoFeedback()), "NONE");
  EXPECT_EQ(TreatmentForPolicy(FeedbackPolicy::Cutoff(0.33)), "");
}

TEST(SignalFormatTest, RoundTrip) {
  const FeedbackPolicy c5 = FeedbackPolicy::Cutoff(0.25);
  Rng rng(1);
  for (double b : {0.0, 0.1, 0.25, 0.9}) {
    const Signal s = SignalOf(c5, b, 0.0, rng);
    EXPECT_EQ(ParseSignal(FormatSignal(s), c5), s);
  }
  EXPECT_EQ(FormatSignal(SignalOf(c5, 0.1, 0.0, rng)), "cell:0,5");
  EXPECT_EQ(FormatSignal(ExactBidSignal{0.35}), "exact:7");
  EXPECT_EQ(ParseSignal("exact:7", FeedbackPolicy::Full()), Signal(ExactBidSignal{0.35}));
  EXPECT_EQ(FormatSignal(RankSignal{true}), "rank:higher");
  EXPECT_EQ(ParseSignal("rank:lower", FeedbackPolicy::Rank()), Signal(RankSignal{false}));
  EXPECT_THROW(ParseSignal("rank:lower", c5), SchemaError);
  EXPECT_THROW(ParseSignal("cell:0,7", c5), SchemaError);
  EXPECT_THROW(ParseSignal("exact:x", FeedbackPolicy::Full()), SchemaError);
}

TEST(CsvTest, RoundTripOfExperiment) {
  ExperimentConfig c;
  c.n_sessions = 4;
  c.subjects_per_session = {4};
  Rng rng(2);
  const auto rows = RunExperiment(c, {{1.0, CssAgent{0.5, {CellSelector::Kind::kUniformPositive, 0}}}}, rng);
  std::ostringstream out;
  WriteCsv(out, rows);
  EXPECT_EQ(Read(out.str()), rows);
  EXPECT_NE(out.str().find("\"cell:0,5\""), std::string::npos);
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
}

TEST(CsvTest, AcceptsCrlfAndQuotedFields) {
  const auto rows = Read(std::string(kCsvHeader) + "\r\n1,1,main,C5,1,2,5,10,\"cell:5,20\",1,45\r\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].signal, "cell:5,20");
  EXPECT_EQ(rows[0].total_raw(), 15);
  EXPECT_TRUE(rows[0].BalanceIdentityHolds());
}

TEST(CsvTest, SchemaErrors) {
  EXPECT_THROW(Read(""), SchemaError);
  EXPECT_THROW(Read("session,round\n1,1\n"), SchemaError);
  EXPECT_THROW(Read(Csv("1,1,main,C5,1,2,5,10\n")), SchemaError);
  EXPECT_THROW(Read(Csv("1,1,warmup,C5,1,2,5,10,\"cell:5,20\",1,45\n")), SchemaError);
  EXPECT_THROW(Read(Csv("1,1,main,C7x,1,2,5,10,\"cell:5,20\",1,45\n")), SchemaError);
  EXPECT_THROW(Read(Csv("1,1,main,C5,1,2,five,10,\"cell:5,20\",1,45\n")), SchemaError);
  EXPECT_THROW(Read(Csv("1,1,main,C5,1,2,30,11,\"cell:5,20\",1,45\n")), SchemaError);
  EXPECT_THROW(Read(Csv("1,1,main,C5,1,2,5,10,\"cell:5,20,1,45\n")), SchemaError);
}

TEST(CsvTest, HeaderOnlyIsEmptyDataset) { EXPECT_TRUE(Read(Csv("")).empty()); }

TEST(BidRecordTest, BalanceIdentity) {
  BidRecord r;
  r.b1_raw = 5;
  r.b2_raw = 10;
  r.won = true;
  r.final_balance = 45;
  EXPECT_TRUE(r.BalanceIdentityHolds());
  r.won = false;
  EXPECT_FALSE(r.BalanceIdentityHolds());
  r.final_balance = 25;
  EXPECT_TRUE(r.BalanceIdentityHolds());
}

TEST(ToDirhamsTest, LatticeValues) {
  EXPECT_EQ(ToDirhams(0.35), 7);
  EXPECT_EQ(ToDirhams(0.15000000000000002), 3);
  EXPECT_EQ(ToDirhams(2.0), 40);
}

}  // namespace
}  // namespace contestlab
