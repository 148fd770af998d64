// Tests of the extern "C" surface. Links libhexatag only, so everything here
// is what a foreign-language binding would see.
#include <hexatag/hexatag.h>

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr char kAbcd[] =
    "1\tA\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tB\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "3\tC\t_\tADJ\t_\t_\t4\tamod\t_\t_\n"
    "4\tD\t_\tNOUN\t_\t_\t2\tobj\t_\t_\n\n";

std::string Own(char *s) {
  std::string out = s ? s : "";
  hexa_string_free(s);
  return out;
}

hexa_corpus *Parse(const std::string &text) {
  hexa_corpus *c = nullptr;
  EXPECT_EQ(hexa_corpus_parse(text.data(), text.size(), &c), HEXA_OK) << hexa_last_error();
  return c;
}

hexa_vocab *Unlabeled() {
  hexa_vocab *v = nullptr;
  EXPECT_EQ(hexa_vocab_unlabeled(&v), HEXA_OK);
  return v;
}

std::vector<int> Heads(const hexa_parse *p) {
  std::vector<int> h;
  for (size_t i = 1; i <= hexa_parse_length(p); ++i) h.push_back(hexa_parse_head(p, i));
  return h;
}

TEST(CApi, VersionAndDefaults) {
  EXPECT_STREQ(hexa_version(), "0.1.0");
  EXPECT_EQ(hexa_default_depth_cap(), 32u);
  hexa_train_config cfg;
  hexa_train_config_init(&cfg);
  EXPECT_GT(cfg.epochs, 0);
  EXPECT_GT(cfg.learning_rate, 0.0);
  EXPECT_EQ(cfg.order, HEXA_ORDER_LEFT_FIRST);
}

TEST(CApi, EncodeAbcdBothOrders) {
  hexa_corpus *c = Parse(kAbcd);
  ASSERT_EQ(hexa_corpus_size(c), 1u);
  EXPECT_EQ(hexa_corpus_sentence_length(c, 0), 4u);
  char *tags = nullptr;
  ASSERT_EQ(hexa_encode(c, 0, HEXA_ORDER_LEFT_FIRST, 0, &tags), HEXA_OK);
  EXPECT_EQ(Own(tags), "tl LR tr LL tl RR tr");
  ASSERT_EQ(hexa_encode(c, 0, HEXA_ORDER_LEFT_FIRST, 1, &tags), HEXA_OK);
  EXPECT_EQ(Own(tags), "tl/nsubj LR tr/root LL tl/amod RR tr/obj");
  EXPECT_EQ(hexa_encode(c, 3, HEXA_ORDER_LEFT_FIRST, 0, &tags), HEXA_E_ARGUMENT);
  hexa_corpus_free(c);
}

TEST(CApi, EncodeHeads) {
  const int heads[] = {2, 0, 4, 2};
  char *tags = nullptr;
  ASSERT_EQ(hexa_encode_heads(heads, nullptr, 4, HEXA_ORDER_LEFT_FIRST, 0, &tags), HEXA_OK);
  EXPECT_EQ(Own(tags), "tl LR tr LL tl RR tr");

  const int single[] = {0};
  const char *root[] = {"root"};
  ASSERT_EQ(hexa_encode_heads(single, root, 1, HEXA_ORDER_LEFT_FIRST, 1, &tags), HEXA_OK);
  EXPECT_EQ(Own(tags), "tl/root");
}

TEST(CApi, NonProjectiveHeadsReportCrossingArcs) {
  const int heads[] = {2, 0, 1};
  char *tags = nullptr;
  EXPECT_EQ(hexa_encode_heads(heads, nullptr, 3, HEXA_ORDER_LEFT_FIRST, 0, &tags),
            HEXA_E_NONPROJECTIVE);
  EXPECT_EQ(tags, nullptr);
  EXPECT_NE(std::string(hexa_last_error()).find("crosses"), std::string::npos)
      << hexa_last_error();
}

TEST(CApi, StructuralErrorsHaveDistinctCodes) {
  const int two_roots[] = {0, 0};
  char *tags = nullptr;
  EXPECT_EQ(hexa_encode_heads(two_roots, nullptr, 2, HEXA_ORDER_LEFT_FIRST, 0, &tags),
            HEXA_E_STRUCTURE);
  hexa_corpus *c = nullptr;
  const std::string bad = "1\tA\t_\tX\t_\t_\tzz\troot\t_\t_\n\n";
  EXPECT_EQ(hexa_corpus_parse(bad.data(), bad.size(), &c), HEXA_E_PARSE);
  EXPECT_EQ(c, nullptr);
  EXPECT_EQ(hexa_corpus_read("/nonexistent/file.conllu", &c), HEXA_E_IO);
  EXPECT_EQ(hexa_encode_heads(nullptr, nullptr, 1, HEXA_ORDER_LEFT_FIRST, 0, &tags),
            HEXA_E_ARGUMENT);
}

TEST(CApi, LastErrorIsPerThread) {
  const int heads[] = {2, 0, 1};
  char *tags = nullptr;
  ASSERT_EQ(hexa_encode_heads(heads, nullptr, 3, HEXA_ORDER_LEFT_FIRST, 0, &tags),
            HEXA_E_NONPROJECTIVE);
  const std::string mine = hexa_last_error();
  std::string theirs = "unset";
  std::thread t([&] { theirs = hexa_last_error(); });
  t.join();
  EXPECT_EQ(theirs, "");
  EXPECT_EQ(hexa_last_error(), mine);
}

TEST(CApi, Validity) {
  int valid = -1;
  ASSERT_EQ(hexa_is_valid("tl LR tr LL tl RR tr", 0, &valid), HEXA_OK);
  EXPECT_EQ(valid, 1);
  ASSERT_EQ(hexa_is_valid("tl LR tr LL tl RR tr", 1, &valid), HEXA_OK);
  EXPECT_EQ(valid, 0);  // needs depth 2
  ASSERT_EQ(hexa_is_valid("tr", 0, &valid), HEXA_OK);
  EXPECT_EQ(valid, 0);
  EXPECT_EQ(hexa_is_valid("tl XX tr", 0, &valid), HEXA_E_PARSE);
}

TEST(CApi, DecodeTags) {
  const char *forms[] = {"A", "B", "C", "D"};
  hexa_parse *p = nullptr;
  ASSERT_EQ(hexa_decode_tags("tl LR tr LL tl RR tr", forms, 4, &p), HEXA_OK);
  EXPECT_EQ(Heads(p), (std::vector<int>{2, 0, 4, 2}));
  EXPECT_EQ(hexa_parse_head(p, 0), -1);
  EXPECT_EQ(hexa_parse_head(p, 5), -1);
  EXPECT_STREQ(hexa_parse_deprel(p, 2), "root");
  EXPECT_EQ(hexa_parse_deprel(p, 9), nullptr);
  char *conllu = nullptr;
  ASSERT_EQ(hexa_parse_to_conllu(p, &conllu), HEXA_OK);
  EXPECT_EQ(Own(conllu).substr(0, 4), "1\tA\t");
  hexa_parse_free(p);

  EXPECT_EQ(hexa_decode_tags("tl LR tr RR tl RR tr", nullptr, 0, &p), HEXA_E_TRANSITION);
  EXPECT_NE(std::string(hexa_last_error()).find("position 4"), std::string::npos)
      << hexa_last_error();
  EXPECT_EQ(hexa_decode_tags("tl LR tr", forms, 4, &p), HEXA_E_ARGUMENT);
}

// Tag columns of the unlabeled vocabulary: terminal tl, tr; nonterminal
// LL, LR, RL, RR.
struct Table {
  std::vector<double> term, nonterm;
  size_t n;
};

Table OneHot(const std::vector<int> &term_ids, const std::vector<int> &nonterm_ids) {
  Table t{std::vector<double>(term_ids.size() * 2, 0.0),
          std::vector<double>(nonterm_ids.size() * 4, 0.0), term_ids.size()};
  for (size_t i = 0; i < term_ids.size(); ++i) t.term[i * 2 + term_ids[i]] = 1.0;
  for (size_t i = 0; i < nonterm_ids.size(); ++i) t.nonterm[i * 4 + nonterm_ids[i]] = 1.0;
  return t;
}

TEST(CApi, DecodeScoresOneHotWorkedTable) {
  hexa_vocab *v = Unlabeled();
  ASSERT_EQ(hexa_vocab_terminal_count(v), 2u);
  // tl LR tr LL tl RR tr
  Table t = OneHot({0, 1, 0, 1}, {1, 0, 3});
  hexa_parse *p = nullptr;
  ASSERT_EQ(hexa_decode_scores(v, nullptr, t.n, t.term.data(), 2, t.nonterm.data(), 4, 0, &p),
            HEXA_OK)
      << hexa_last_error();
  EXPECT_EQ(Heads(p), (std::vector<int>{2, 0, 4, 2}));
  EXPECT_STREQ(hexa_parse_tags(p), "tl LR tr LL tl RR tr");
  EXPECT_DOUBLE_EQ(hexa_parse_log_score(p), 7.0);
  hexa_parse_free(p);
  hexa_vocab_free(v);
}

TEST(CApi, DecodeScoresAllZeroFollowsTieRule) {
  // All sequences score 0; the decoder keeps the smallest tag ids, giving
  // "tl LL tr": word 1 heads word 2 (LL puts the head on the left child).
  hexa_vocab *v = Unlabeled();
  std::vector<double> term(4, 0.0), nonterm(4, 0.0);
  hexa_parse *p = nullptr;
  ASSERT_EQ(hexa_decode_scores(v, nullptr, 2, term.data(), 2, nonterm.data(), 4, 0, &p), HEXA_OK);
  EXPECT_STREQ(hexa_parse_tags(p), "tl LL tr");
  EXPECT_EQ(Heads(p), (std::vector<int>{0, 1}));
  EXPECT_EQ(hexa_parse_log_score(p), 0.0);
  hexa_parse_free(p);
  hexa_vocab_free(v);
}

TEST(CApi, DecodeScoresShapeMismatchNamesDimensions) {
  hexa_vocab *v = Unlabeled();
  std::vector<double> term(8, 0.0), nonterm(12, 0.0);
  hexa_parse *p = nullptr;
  EXPECT_EQ(hexa_decode_scores(v, nullptr, 4, term.data(), 3, nonterm.data(), 4, 0, &p),
            HEXA_E_ARGUMENT);
  EXPECT_EQ(p, nullptr);
  const std::string msg = hexa_last_error();
  EXPECT_NE(msg.find("expected terminal 4x2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("4x3"), std::string::npos) << msg;
  EXPECT_EQ(hexa_decode_scores(v, nullptr, 0, term.data(), 2, nonterm.data(), 4, 0, &p),
            HEXA_E_ARGUMENT);
  hexa_vocab_free(v);
}

TEST(CApi, RepeatedCallsAreIdentical) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  hexa_vocab *v = Unlabeled();
  for (int trial = 0; trial < 20; ++trial) {
    const size_t n = 1 + trial % 9;
    std::vector<double> term(n * 2), nonterm((n - 1) * 4);
    for (double &x : term) x = gauss(rng);
    for (double &x : nonterm) x = gauss(rng);
    hexa_parse *a = nullptr;
    hexa_parse *b = nullptr;
    ASSERT_EQ(hexa_decode_scores(v, nullptr, n, term.data(), 2, nonterm.data(), 4, 0, &a), HEXA_OK);
    ASSERT_EQ(hexa_decode_scores(v, nullptr, n, term.data(), 2, nonterm.data(), 4, 0, &b), HEXA_OK);
    EXPECT_STREQ(hexa_parse_tags(a), hexa_parse_tags(b));
    EXPECT_EQ(hexa_parse_log_score(a), hexa_parse_log_score(b));
    int valid = 0;
    ASSERT_EQ(hexa_is_valid(hexa_parse_tags(a), 0, &valid), HEXA_OK);
    EXPECT_EQ(valid, 1);
    hexa_parse_free(a);
    hexa_parse_free(b);
  }
  hexa_vocab_free(v);
}

TEST(CApi, VocabRoundTrip) {
  hexa_corpus *c = Parse(kAbcd);
  hexa_vocab *v = nullptr;
  ASSERT_EQ(hexa_vocab_from_corpus(c, 1, &v), HEXA_OK);
  EXPECT_EQ(hexa_vocab_terminal_count(v), 8u);  // tl/x and tr/x for 4 labels
  char *text = nullptr;
  ASSERT_EQ(hexa_vocab_write(v, &text), HEXA_OK);
  const std::string t = Own(text);
  EXPECT_EQ(t.substr(0, 12), "LL\nLR\nRL\nRR\n");
  hexa_vocab *back = nullptr;
  ASSERT_EQ(hexa_vocab_parse(t.data(), t.size(), &back), HEXA_OK);
  ASSERT_EQ(hexa_vocab_write(back, &text), HEXA_OK);
  EXPECT_EQ(Own(text), t);
  hexa_vocab_free(back);
  hexa_vocab_free(v);
  hexa_corpus_free(c);
}

TEST(CApi, ScoreJsonlDecodesInOrder) {
  hexa_vocab *v = Unlabeled();
  const std::string jsonl =
      "{\"tokens\":[\"A\",\"B\",\"C\",\"D\"],"
      "\"terminal_scores\":[[1,0],[0,1],[1,0],[0,1]],"
      "\"nonterminal_scores\":[[0,1,0,0],[1,0,0,0],[0,0,0,1]]}\n"
      "{\"tokens\":[\"x\"],\"terminal_scores\":[[1,0]],\"nonterminal_scores\":[]}\n";
  hexa_corpus *out = nullptr;
  ASSERT_EQ(hexa_decode_score_jsonl(v, jsonl.data(), jsonl.size(), 0, 2, &out), HEXA_OK)
      << hexa_last_error();
  ASSERT_EQ(hexa_corpus_size(out), 2u);
  char *text = nullptr;
  ASSERT_EQ(hexa_corpus_write(out, &text), HEXA_OK);
  const std::string conllu = Own(text);
  EXPECT_NE(conllu.find("3\tC\t_\t_\t_\t_\t4\t"), std::string::npos) << conllu;
  EXPECT_NE(conllu.find("1\tx\t_\t_\t_\t_\t0\troot"), std::string::npos) << conllu;
  hexa_corpus_free(out);

  const std::string broken = "{\"tokens\":[\"A\"]}\n";
  EXPECT_EQ(hexa_decode_score_jsonl(v, broken.data(), broken.size(), 0, 1, &out), HEXA_E_PARSE);
  EXPECT_NE(std::string(hexa_last_error()).find("score line 1"), std::string::npos);
  hexa_vocab_free(v);
}

TEST(CApi, EncodeCorpusCollectsRejects) {
  const std::string nonproj =
      "1\tx\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
      "2\ty\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\tz\t_\tNOUN\t_\t_\t1\tnmod\t_\t_\n\n";
  hexa_corpus *c = Parse(std::string(kAbcd) + nonproj + kAbcd);
  char *tags = nullptr;
  char *rejects = nullptr;
  size_t rejected = 0;
  ASSERT_EQ(hexa_encode_corpus(c, HEXA_ORDER_LEFT_FIRST, 0, 2, &tags, &rejects, &rejected),
            HEXA_OK);
  EXPECT_EQ(rejected, 1u);
  EXPECT_EQ(Own(tags), "tl LR tr LL tl RR tr\ntl LR tr LL tl RR tr\n");
  EXPECT_EQ(Own(rejects).substr(0, 2), "2\t");

  hexa_verify_summary s{};
  char *report = nullptr;
  ASSERT_EQ(hexa_verify(c, HEXA_ORDER_RIGHT_FIRST, 2, &s, &report), HEXA_OK);
  EXPECT_EQ(s.verified, 2u);
  EXPECT_EQ(s.rejected, 1u);
  EXPECT_EQ(s.mismatched, 0u);
  EXPECT_NE(Own(report).find("reject sentence 2"), std::string::npos);
  hexa_corpus_free(c);
}

TEST(CApi, Evaluate) {
  hexa_corpus *gold = Parse(kAbcd);
  std::string wrong = kAbcd;
  const std::string arc = "3\tC\t_\tADJ\t_\t_\t4";
  wrong.replace(wrong.find(arc), arc.size(), "3\tC\t_\tADJ\t_\t_\t2");
  hexa_corpus *pred = Parse(wrong);
  hexa_eval_summary s{};
  char *text = nullptr;
  char *json = nullptr;
  ASSERT_EQ(hexa_evaluate(gold, pred, HEXA_PUNCT_NONE, &s, &text, &json), HEXA_OK);
  EXPECT_DOUBLE_EQ(s.uas, 75.0);
  EXPECT_DOUBLE_EQ(s.las, 75.0);
  EXPECT_EQ(s.counted, 4u);
  EXPECT_NE(Own(text).find("UAS 75.0"), std::string::npos);
  EXPECT_NE(Own(json).find("\"uas\":75.0"), std::string::npos);
  ASSERT_EQ(hexa_evaluate(gold, gold, HEXA_PUNCT_UPOS, &s, nullptr, nullptr), HEXA_OK);
  EXPECT_EQ(s.uas, 100.0);

  hexa_corpus *two = Parse(std::string(kAbcd) + kAbcd);
  EXPECT_EQ(hexa_evaluate(gold, two, HEXA_PUNCT_NONE, &s, nullptr, nullptr), HEXA_E_ALIGNMENT);
  hexa_corpus_free(two);
  hexa_corpus_free(pred);
  hexa_corpus_free(gold);
}

TEST(CApi, TrainSaveLoadPredict) {
  hexa_corpus *c = Parse(kAbcd);
  hexa_train_config cfg;
  hexa_train_config_init(&cfg);
  cfg.epochs = 20;
  hexa_model *m = nullptr;
  ASSERT_EQ(hexa_model_train(c, &cfg, &m), HEXA_OK) << hexa_last_error();
  ASSERT_EQ(hexa_model_loss_count(m), 21u);
  EXPECT_LT(hexa_model_loss(m, 20), hexa_model_loss(m, 0));
  EXPECT_EQ(hexa_model_skipped(m), 0u);

  const std::string path = ::testing::TempDir() + "capi_model_" + std::to_string(getpid()) + ".bin";
  ASSERT_EQ(hexa_model_save(m, path.c_str()), HEXA_OK);
  hexa_model *loaded = nullptr;
  ASSERT_EQ(hexa_model_load(path.c_str(), &loaded), HEXA_OK) << hexa_last_error();

  char *a = nullptr;
  char *b = nullptr;
  ASSERT_EQ(hexa_model_export_scores(m, c, &a), HEXA_OK);
  ASSERT_EQ(hexa_model_export_scores(loaded, c, &b), HEXA_OK);
  EXPECT_EQ(Own(a), Own(b));

  hexa_corpus *pred = nullptr;
  ASSERT_EQ(hexa_model_predict(loaded, c, hexa_default_depth_cap(), 2, &pred), HEXA_OK);
  hexa_eval_summary s{};
  ASSERT_EQ(hexa_evaluate(c, pred, HEXA_PUNCT_NONE, &s, nullptr, nullptr), HEXA_OK);
  EXPECT_EQ(s.uas, 100.0);
  EXPECT_EQ(s.las, 100.0);

  // A truncated file is a format error, not a crash.
  {
    FILE *f = std::fopen(path.c_str(), "r+b");
    ASSERT_NE(f, nullptr);
    std::fclose(f);
    ASSERT_EQ(truncate(path.c_str(), 20), 0);
  }
  hexa_model *broken = nullptr;
  EXPECT_EQ(hexa_model_load(path.c_str(), &broken), HEXA_E_MODEL_FORMAT);
  EXPECT_EQ(broken, nullptr);
  std::remove(path.c_str());

  cfg.epochs = 0;
  hexa_model *none = nullptr;
  EXPECT_EQ(hexa_model_train(c, &cfg, &none), HEXA_E_ARGUMENT);

  hexa_corpus_free(pred);
  hexa_model_free(loaded);
  hexa_model_free(m);
  hexa_corpus_free(c);
}

TEST(CApi, Bench) {
  const int lengths[] = {1, 4};
  char *json = nullptr;
  ASSERT_EQ(hexa_bench(lengths, 2, 3, 1, 5, 0, &json), HEXA_OK);
  const std::string j = Own(json);
  EXPECT_NE(j.find("\"rows\""), std::string::npos);
  EXPECT_NE(j.find("\"length\":4"), std::string::npos);
  const int zero[] = {0};
  EXPECT_EQ(hexa_bench(zero, 1, 3, 1, 5, 0, &json), HEXA_E_ARGUMENT);
}

TEST(CApi, FreeFunctionsAcceptNull) {
  hexa_string_free(nullptr);
  hexa_corpus_free(nullptr);
  hexa_vocab_free(nullptr);
  hexa_model_free(nullptr);
  hexa_parse_free(nullptr);
  SUCCEED();
}

}  // namespace
