#include "hexatag/workflows.h"

#include <gtest/gtest.h>

#include "hexatag/error.h"
#include "json.hpp"
#include "support/synthetic.h"

namespace hexatag {
namespace {

Corpus MixedCorpus() {
  Corpus c = testing::SyntheticTreebank(12, 21);
  c.sentences.insert(c.sentences.begin() + 3, MakeTree({0, 1, 1, 2}));
  return c;
}

TEST(EncodeCorpus, SkipsNonProjectiveSentencesAndKeepsOrder) {
  Corpus c = MixedCorpus();
  EncodedCorpus enc = EncodeCorpus(c, BinarizationOrder::kLeftFirst, true, 3);
  ASSERT_EQ(enc.rejects.size(), 1u);
  EXPECT_EQ(enc.rejects[0].sentence, 4u);
  EXPECT_NE(enc.rejects[0].reason.find("crosses"), std::string::npos);
  ASSERT_EQ(enc.lines.size(), 12u);
  EXPECT_EQ(enc.lines[3], SerializeTags(Encode(c.sentences[4], BinarizationOrder::kLeftFirst, true)));
}

TEST(VerifyCorpus, CountsVerifiedAndRejected) {
  for (auto order : {BinarizationOrder::kLeftFirst, BinarizationOrder::kRightFirst}) {
    VerifySummary v = VerifyCorpus(MixedCorpus(), order, 2);
    EXPECT_EQ(v.verified, 12u);
    ASSERT_EQ(v.rejects.size(), 1u);
    EXPECT_NE(v.rejects[0].reason.find("arc"), std::string::npos);
    EXPECT_TRUE(v.mismatches.empty());
  }
}

TEST(RunBench, ProducesOneRowPerLength) {
  auto rows = RunBench({1, 8, 16}, 5, 2, 42, kDefaultDepthCap);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].length, 1);
  EXPECT_EQ(rows[2].sentences, 5);
  EXPECT_EQ(rows[2].runs, 2);
  for (const BenchRow &r : rows) {
    EXPECT_GT(r.mean_seconds_per_sentence, 0.0);
    EXPECT_GT(r.sentences_per_second, 0.0);
  }
  auto j = nlohmann::json::parse(BenchJson(rows, kDefaultDepthCap));
  EXPECT_EQ(j["max_depth"].get<int>(), kDefaultDepthCap);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["rows"][1]["length"].get<int>(), 8);
  EXPECT_GE(PeakRssKb(), 0);
}

TEST(RunBench, RejectsBadArguments) {
  EXPECT_THROW(RunBench({0}, 1, 1, 1, 0), Error);
  EXPECT_THROW(RunBench({4}, 0, 1, 1, 0), Error);
}

}  // namespace
}  // namespace hexatag
