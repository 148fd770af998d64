#include "hexatag/model.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include <unistd.h>

#include "hexatag/eval.h"
#include "support/expect_error.h"
#include "support/synthetic.h"

namespace hexatag {
namespace {

TEST(WordFeatures, WindowAffixesAndBoundaries) {
  std::vector<std::string> forms = {"Café", "au", "lait"};
  std::vector<std::string> upos = {"NOUN", "ADP", "NOUN"};
  auto f = WordFeatures(forms, upos, 0, true);
  auto has = [&](const std::string &name) {
    return std::find(f.begin(), f.end(), name) != f.end();
  };
  EXPECT_TRUE(has("bias"));
  EXPECT_TRUE(has("w=Café"));
  EXPECT_TRUE(has("lw=café"));
  EXPECT_TRUE(has("w-1=<s>"));
  EXPECT_TRUE(has("w+2=lait"));
  EXPECT_TRUE(has("p+1=ADP"));
  EXPECT_TRUE(has("pp+1=NOUN|ADP"));
  EXPECT_TRUE(has("suf1=é"));  // whole code point, not a byte
  EXPECT_TRUE(has("pre3=Caf"));
  EXPECT_TRUE(has("first"));
  auto no_upos = WordFeatures(forms, upos, 2, false);
  for (const std::string &name : no_upos) {
    EXPECT_NE(name.substr(0, 2), "p=");
    EXPECT_NE(name.substr(0, 2), "pp");
    EXPECT_NE(name.substr(0, 3), "p-1");
  }
  EXPECT_NE(std::find(no_upos.begin(), no_upos.end(), "last"), no_upos.end());
}

// Central finite differences against the analytic gradient.
TEST(PositionLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal(0.0, 1.0);
  // h = 1e-5 lets cancellation dominate on entries near 1e-7; 1e-4 balances it
  // against truncation error.
  const double h = 1e-4;
  for (int instance = 0; instance < 50; ++instance) {
    const int rows = 6 + static_cast<int>(rng() % 10);
    const int cols = 2 + static_cast<int>(rng() % 9);
    Matrix w(rows, cols);
    for (double &v : w.data) v = normal(rng);
    std::vector<int> features;
    const int active = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < active; ++k) features.push_back(static_cast<int>(rng() % rows));
    const int gold = static_cast<int>(rng() % cols);

    Matrix grad(rows, cols);
    PositionLoss(w, features, gold, &grad);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        Matrix plus = w, minus = w;
        plus.at(r, c) += h;
        minus.at(r, c) -= h;
        double numeric = (PositionLoss(plus, features, gold) - PositionLoss(minus, features, gold)) /
                         (2 * h);
        double analytic = grad.at(r, c);
        double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
        ASSERT_LT(std::abs(numeric - analytic) / scale, 1e-4)
            << "instance " << instance << " entry (" << r << "," << c << ")";
      }
    }
  }
}

TEST(ScoreSentence, UntrainedModelIsUniform) {
  FeatureDictionary dict;
  dict.Add("bias");
  auto vocab = std::make_shared<const TagVocab>(TagVocab::FromLabels({"a", "b", "root"}));
  LinearTagModel model = MakeModel(dict, vocab);
  ScoreTable t = ScoreSentence(model, {"x", "y", "z"}, {});
  for (double v : t.terminal.data) EXPECT_NEAR(v, std::log(1.0 / 6), 1e-12);
  for (double v : t.nonterminal.data) EXPECT_NEAR(v, std::log(0.25), 1e-12);
  EXPECT_HEXA_ERROR(ScoreSentence(model, {}, {}), ErrorCode::kInvalidArgument, "empty");
}

TEST(Train, OverfitsASingleSentence) {
  Corpus c;
  c.sentences.push_back(MakeTree({2, 0, 4, 2}, {"nsubj", "root", "amod", "obj"},
                                 {"She", "reads", "fascinating", "papers"}));
  TrainConfig cfg;
  cfg.epochs = 10;
  LinearTagModel m = Train(c, cfg);
  Corpus pred = PredictCorpus(m, c);
  EvalReport r = AttachmentScores(c, pred, PunctPolicy::kNone);
  EXPECT_EQ(r.uas, 100.0);
  EXPECT_EQ(r.las, 100.0);
}

TEST(Train, LossStartsAtUniformAndDecreases) {
  Corpus c = testing::SyntheticTreebank(80, 5);
  TrainConfig cfg;
  cfg.epochs = 5;
  LinearTagModel m = Train(c, cfg);
  ASSERT_EQ(m.epoch_loss.size(), 6u);
  // Before training every row is uniform: the mean of log|V_t| and log 4.
  const double vt = m.vocab->terminal_count();
  int n_total = 0, positions = 0;
  for (const DepTree &t : c.sentences) {
    n_total += t.size();
    positions += 2 * t.size() - 1;
  }
  double expected = (n_total * std::log(vt) + (n_total - static_cast<int>(c.sentences.size())) *
                                                  std::log(4.0)) /
                    positions;
  EXPECT_NEAR(m.epoch_loss[0], expected, 1e-9);
  EXPECT_LT(m.epoch_loss.back(), 0.5 * m.epoch_loss.front());
  EXPECT_NEAR(CorpusLoss(m, c), m.epoch_loss.back(), 1e-9);
}

TEST(Train, SkipsOrRejectsNonProjectiveSentences) {
  Corpus c = testing::SyntheticTreebank(5, 2);
  c.sentences.push_back(MakeTree({0, 1, 1, 2}));
  TrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_EQ(Train(c, cfg).skipped_sentences, 1);
  cfg.strict = true;
  EXPECT_HEXA_ERROR(Train(c, cfg), ErrorCode::kNonProjective, "sentence 6");
  cfg.epochs = 0;
  EXPECT_HEXA_ERROR(Train(c, cfg), ErrorCode::kInvalidArgument, "epochs");
}

TEST(Train, IsDeterministicForAFixedSeed) {
  Corpus c = testing::SyntheticTreebank(30, 9);
  TrainConfig cfg;
  cfg.epochs = 2;
  EXPECT_EQ(SerializeModel(Train(c, cfg)), SerializeModel(Train(c, cfg)));
}

TEST(PredictCorpus, ParallelMatchesSerial) {
  Corpus c = testing::SyntheticTreebank(40, 4);
  TrainConfig cfg;
  cfg.epochs = 2;
  LinearTagModel m = Train(c, cfg);
  Corpus a = PredictCorpus(m, c, 0, 1);
  Corpus b = PredictCorpus(m, c, 0, 4);
  ASSERT_EQ(a.sentences.size(), b.sentences.size());
  for (size_t s = 0; s < a.sentences.size(); ++s) EXPECT_EQ(a.sentences[s], b.sentences[s]);
  EXPECT_EQ(a.sentences[0].tokens[0].upos, c.sentences[0].tokens[0].upos);
}

class ModelFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = testing::SyntheticTreebank(20, 12);
    TrainConfig cfg;
    cfg.epochs = 2;
    model_ = Train(corpus_, cfg);
    path_ = (std::filesystem::temp_directory_path() /
             ("hexatag_model_" + std::to_string(::getpid()) + ".bin"))
                .string();
  }
  void TearDown() override { std::remove(path_.c_str()); }

  Corpus corpus_;
  LinearTagModel model_;
  std::string path_;
};

TEST_F(ModelFileTest, SaveLoadIsBitExact) {
  SaveModel(model_, path_);
  LinearTagModel loaded = LoadModel(path_);
  EXPECT_EQ(SerializeModel(loaded), SerializeModel(model_));
  EXPECT_EQ(ExportScores(loaded, corpus_), ExportScores(model_, corpus_));
  EXPECT_EQ(loaded.epoch_loss, model_.epoch_loss);
}

TEST_F(ModelFileTest, TruncatedAndForeignFilesAreRejected) {
  std::string bytes = SerializeModel(model_);
  for (size_t cut : {bytes.size() - 1, bytes.size() / 2, size_t{20}}) {
    EXPECT_HEXA_ERROR(DeserializeModel(bytes.substr(0, cut)), ErrorCode::kModelFormat,
                      "corrupt model file");
  }
  std::string future = bytes;
  future.replace(0, std::string(kModelHeader).size(), "hexa-model/2");
  EXPECT_HEXA_ERROR(DeserializeModel(future), ErrorCode::kModelFormat,
                    "unsupported model format");
  EXPECT_HEXA_ERROR(DeserializeModel("not a model"), ErrorCode::kModelFormat, "header");
  EXPECT_HEXA_ERROR(DeserializeModel(bytes + "x"), ErrorCode::kModelFormat, "trailing");
  EXPECT_HEXA_ERROR(LoadModel(path_ + ".missing"), ErrorCode::kIo, "cannot open");
}

}  // namespace
}  // namespace hexatag
