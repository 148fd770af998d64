// extern "C" wrappers around the C++ core. Every entry point funnels through
// Guard(), which turns exceptions into status codes and records the message
// for hexa_last_error().
#include "hexatag/hexatag.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "hexatag/codec.h"
#include "hexatag/decoder.h"
#include "hexatag/error.h"
#include "hexatag/eval.h"
#include "hexatag/model.h"
#include "hexatag/parallel.h"
#include "hexatag/treebank.h"
#include "hexatag/workflows.h"

struct hexa_corpus {
  hexatag::Corpus corpus;
};

struct hexa_vocab {
  std::shared_ptr<const hexatag::TagVocab> vocab;
};

struct hexa_model {
  hexatag::LinearTagModel model;
};

struct hexa_parse {
  hexatag::DepTree tree;
  std::string tags;
  double log_score = 0.0;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
hexa_status Guard(Fn &&fn) {
  try {
    fn();
    g_last_error.clear();
    return HEXA_OK;
  } catch (const hexatag::Error &e) {
    g_last_error = e.what();
    return static_cast<hexa_status>(e.code());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
  } catch (const std::exception &e) {
    g_last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    g_last_error = "internal error: unknown exception";
  }
  return HEXA_E_INTERNAL;
}

void Require(bool ok, const char *what) {
  if (!ok) hexatag::Fail(hexatag::ErrorCode::kInvalidArgument, what);
}

char *CopyString(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

hexatag::BinarizationOrder ToOrder(hexa_order order) {
  switch (order) {
    case HEXA_ORDER_LEFT_FIRST: return hexatag::BinarizationOrder::kLeftFirst;
    case HEXA_ORDER_RIGHT_FIRST: return hexatag::BinarizationOrder::kRightFirst;
  }
  hexatag::Fail(hexatag::ErrorCode::kInvalidArgument, "unknown binarization order");
}

int ToDepth(size_t max_depth) {
  Require(max_depth <= 1u << 30, "max_depth is too large");
  return static_cast<int>(max_depth);
}

std::vector<std::string> Strings(const char *const *items, size_t n) {
  std::vector<std::string> out;
  if (items == nullptr) return out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Require(items[i] != nullptr, "string array contains a null entry");
    out.emplace_back(items[i]);
  }
  return out;
}

hexatag::TrainConfig ToConfig(const hexa_train_config &c) {
  Require(c.epochs >= 1, "epochs must be >= 1");
  Require(c.batch_size >= 1, "batch_size must be >= 1");
  Require(c.learning_rate > 0, "learning_rate must be > 0");
  Require(c.l2 >= 0, "l2 must be >= 0");
  hexatag::TrainConfig out;
  out.epochs = c.epochs;
  out.learning_rate = c.learning_rate;
  out.l2 = c.l2;
  out.seed = c.seed;
  out.shuffle = c.shuffle != 0;
  out.labeled = c.labeled != 0;
  out.order = ToOrder(c.order);
  out.use_upos = c.use_upos != 0;
  out.batch_size = c.batch_size;
  out.strict = c.strict != 0;
  return out;
}

std::string RejectLines(const std::vector<hexatag::Reject> &rejects) {
  std::string out;
  for (const auto &r : rejects) {
    out += std::to_string(r.sentence) + "\t" + r.reason + "\n";
  }
  return out;
}

}  // namespace

extern "C" {

const char *hexa_version(void) { return "0.1.0"; }

const char *hexa_last_error(void) { return g_last_error.c_str(); }

void hexa_string_free(char *s) { std::free(s); }

size_t hexa_default_depth_cap(void) { return hexatag::kDefaultDepthCap; }

hexa_status hexa_corpus_parse(const char *text, size_t length, hexa_corpus **out) {
  return Guard([&] {
    Require(out != nullptr && (text != nullptr || length == 0), "null argument");
    auto c = std::make_unique<hexa_corpus>();
    c->corpus = hexatag::ParseConllu(std::string_view(text ? text : "", length), "<memory>");
    *out = c.release();
  });
}

hexa_status hexa_corpus_read(const char *path, hexa_corpus **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    auto c = std::make_unique<hexa_corpus>();
    c->corpus = hexatag::ReadConlluFile(path);
    *out = c.release();
  });
}

void hexa_corpus_free(hexa_corpus *corpus) { delete corpus; }

size_t hexa_corpus_size(const hexa_corpus *corpus) {
  return corpus ? corpus->corpus.sentences.size() : 0;
}

size_t hexa_corpus_sentence_length(const hexa_corpus *corpus, size_t sentence) {
  if (corpus == nullptr || sentence >= corpus->corpus.sentences.size()) return 0;
  return corpus->corpus.sentences[sentence].tokens.size();
}

hexa_status hexa_corpus_write(const hexa_corpus *corpus, char **out) {
  return Guard([&] {
    Require(corpus != nullptr && out != nullptr, "null argument");
    *out = CopyString(hexatag::WriteConllu(corpus->corpus));
  });
}

hexa_status hexa_encode(const hexa_corpus *corpus, size_t sentence, hexa_order order,
                        int labeled, char **tags) {
  return Guard([&] {
    Require(corpus != nullptr && tags != nullptr, "null argument");
    Require(sentence < corpus->corpus.sentences.size(), "sentence index out of range");
    *tags = CopyString(hexatag::SerializeTags(
        hexatag::Encode(corpus->corpus.sentences[sentence], ToOrder(order), labeled != 0)));
  });
}

hexa_status hexa_encode_heads(const int *heads, const char *const *deprels, size_t n,
                              hexa_order order, int labeled, char **tags) {
  return Guard([&] {
    Require(heads != nullptr && tags != nullptr, "null argument");
    Require(n >= 1, "a sentence needs at least one word");
    std::vector<int> head_vec(heads, heads + n);
    hexatag::DepTree tree = hexatag::MakeTree(head_vec, Strings(deprels, n));
    *tags = CopyString(hexatag::SerializeTags(hexatag::Encode(tree, ToOrder(order), labeled != 0)));
  });
}

hexa_status hexa_encode_corpus(const hexa_corpus *corpus, hexa_order order, int labeled,
                               int jobs, char **tags_text, char **rejects_text,
                               size_t *rejected) {
  return Guard([&] {
    Require(corpus != nullptr && tags_text != nullptr, "null argument");
    hexatag::EncodedCorpus enc =
        hexatag::EncodeCorpus(corpus->corpus, ToOrder(order), labeled != 0, jobs);
    std::string text;
    for (const std::string &line : enc.lines) text += line + "\n";
    std::string rejects = RejectLines(enc.rejects);
    // Allocate everything before handing anything out.
    char *t = CopyString(text);
    char *r = nullptr;
    if (rejects_text != nullptr) {
      try {
        r = CopyString(rejects);
      } catch (...) {
        std::free(t);
        throw;
      }
      *rejects_text = r;
    }
    *tags_text = t;
    if (rejected != nullptr) *rejected = enc.rejects.size();
  });
}

hexa_status hexa_is_valid(const char *tags, size_t max_depth, int *valid) {
  return Guard([&] {
    Require(tags != nullptr && valid != nullptr, "null argument");
    *valid = hexatag::IsValidSequence(hexatag::ParseTags(tags), ToDepth(max_depth)) ? 1 : 0;
  });
}

hexa_status hexa_decode_tags(const char *tags, const char *const *forms, size_t n_forms,
                             hexa_parse **out) {
  return Guard([&] {
    Require(tags != nullptr && out != nullptr, "null argument");
    hexatag::TagSequence seq = hexatag::ParseTags(tags);
    std::vector<std::string> form_vec = Strings(forms, n_forms);
    if (!form_vec.empty() && static_cast<int>(form_vec.size()) != hexatag::WordCount(seq)) {
      hexatag::Fail(hexatag::ErrorCode::kInvalidArgument,
                    "expected " + std::to_string(hexatag::WordCount(seq)) + " forms, got " +
                        std::to_string(form_vec.size()));
    }
    auto p = std::make_unique<hexa_parse>();
    p->tree = hexatag::Decode(seq, form_vec);
    p->tags = hexatag::SerializeTags(seq);
    *out = p.release();
  });
}

hexa_status hexa_vocab_unlabeled(hexa_vocab **out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    auto v = std::make_unique<hexa_vocab>();
    v->vocab = std::make_shared<const hexatag::TagVocab>(hexatag::TagVocab::Unlabeled());
    *out = v.release();
  });
}

hexa_status hexa_vocab_from_corpus(const hexa_corpus *corpus, int labeled, hexa_vocab **out) {
  return Guard([&] {
    Require(corpus != nullptr && out != nullptr, "null argument");
    auto v = std::make_unique<hexa_vocab>();
    v->vocab = std::make_shared<const hexatag::TagVocab>(
        hexatag::TagVocab::FromCorpus(corpus->corpus, labeled != 0));
    *out = v.release();
  });
}

hexa_status hexa_vocab_parse(const char *text, size_t length, hexa_vocab **out) {
  return Guard([&] {
    Require(out != nullptr && (text != nullptr || length == 0), "null argument");
    auto v = std::make_unique<hexa_vocab>();
    v->vocab = std::make_shared<const hexatag::TagVocab>(
        hexatag::TagVocab::Parse(std::string_view(text ? text : "", length)));
    *out = v.release();
  });
}

hexa_status hexa_vocab_write(const hexa_vocab *vocab, char **out) {
  return Guard([&] {
    Require(vocab != nullptr && out != nullptr, "null argument");
    *out = CopyString(vocab->vocab->ToText());
  });
}

size_t hexa_vocab_terminal_count(const hexa_vocab *vocab) {
  return vocab ? static_cast<size_t>(vocab->vocab->terminal_count()) : 0;
}

void hexa_vocab_free(hexa_vocab *vocab) { delete vocab; }

hexa_status hexa_decode_scores(const hexa_vocab *vocab, const char *const *tokens, size_t n,
                               const double *terminal_scores, size_t terminal_cols,
                               const double *nonterminal_scores, size_t nonterminal_cols,
                               size_t max_depth, hexa_parse **out) {
  return Guard([&] {
    Require(vocab != nullptr && out != nullptr && terminal_scores != nullptr, "null argument");
    Require(n >= 1 && n <= 1u << 20, "n must be between 1 and 2^20");
    Require(n == 1 || nonterminal_scores != nullptr, "null nonterminal scores");
    const size_t want_t = static_cast<size_t>(vocab->vocab->terminal_count());
    const size_t want_nt = hexatag::TagVocab::kNonterminalCount;
    if (terminal_cols != want_t || nonterminal_cols != want_nt) {
      hexatag::Fail(hexatag::ErrorCode::kInvalidArgument,
                    "score shape mismatch: expected terminal " + std::to_string(n) + "x" +
                        std::to_string(want_t) + " and nonterminal " + std::to_string(n - 1) +
                        "x" + std::to_string(want_nt) + ", got terminal " + std::to_string(n) +
                        "x" + std::to_string(terminal_cols) + " and nonterminal " +
                        std::to_string(n - 1) + "x" + std::to_string(nonterminal_cols));
    }
    hexatag::ScoreTable table;
    table.n = static_cast<int>(n);
    table.vocab = vocab->vocab;
    table.terminal = hexatag::Matrix(table.n, static_cast<int>(want_t));
    std::memcpy(table.terminal.data.data(), terminal_scores, n * want_t * sizeof(double));
    table.nonterminal = hexatag::Matrix(table.n - 1, static_cast<int>(want_nt));
    if (n > 1) {
      std::memcpy(table.nonterminal.data.data(), nonterminal_scores,
                  (n - 1) * want_nt * sizeof(double));
    }
    std::vector<std::string> forms = Strings(tokens, n);
    hexatag::DecodeResult best = hexatag::ViterbiDecode(table, ToDepth(max_depth));
    auto p = std::make_unique<hexa_parse>();
    p->tree = hexatag::BhtToDep(hexatag::TagsToBht(best.tags), table.n, forms);
    p->tags = hexatag::SerializeTags(best.tags);
    p->log_score = best.log_score;
    *out = p.release();
  });
}

hexa_status hexa_decode_score_jsonl(const hexa_vocab *vocab, const char *text, size_t length,
                                    size_t max_depth, int jobs, hexa_corpus **out) {
  return Guard([&] {
    Require(vocab != nullptr && out != nullptr && (text != nullptr || length == 0),
            "null argument");
    const int depth = ToDepth(max_depth);
    std::vector<hexatag::ScoredSentence> scored =
        hexatag::ParseScoreJsonl(std::string_view(text ? text : "", length), vocab->vocab);
    auto c = std::make_unique<hexa_corpus>();
    c->corpus.sentences.resize(scored.size());
    hexatag::ParallelFor(scored.size(), jobs, [&](size_t s) {
      const hexatag::ScoredSentence &item = scored[s];
      hexatag::DecodeResult best = hexatag::ViterbiDecode(item.scores, depth);
      c->corpus.sentences[s] =
          hexatag::BhtToDep(hexatag::TagsToBht(best.tags), item.scores.n, item.tokens);
    });
    *out = c.release();
  });
}

size_t hexa_parse_length(const hexa_parse *parse) {
  return parse ? parse->tree.tokens.size() : 0;
}

int hexa_parse_head(const hexa_parse *parse, size_t word) {
  if (parse == nullptr || word < 1 || word > parse->tree.tokens.size()) return -1;
  return parse->tree.tokens[word - 1].head;
}

const char *hexa_parse_deprel(const hexa_parse *parse, size_t word) {
  if (parse == nullptr || word < 1 || word > parse->tree.tokens.size()) return nullptr;
  return parse->tree.tokens[word - 1].deprel.c_str();
}

double hexa_parse_log_score(const hexa_parse *parse) { return parse ? parse->log_score : 0.0; }

const char *hexa_parse_tags(const hexa_parse *parse) {
  return parse ? parse->tags.c_str() : nullptr;
}

hexa_status hexa_parse_to_conllu(const hexa_parse *parse, char **out) {
  return Guard([&] {
    Require(parse != nullptr && out != nullptr, "null argument");
    *out = CopyString(hexatag::WriteConllu(parse->tree));
  });
}

void hexa_parse_free(hexa_parse *parse) { delete parse; }

void hexa_train_config_init(hexa_train_config *config) {
  if (config == nullptr) return;
  const hexatag::TrainConfig d;
  config->epochs = d.epochs;
  config->learning_rate = d.learning_rate;
  config->l2 = d.l2;
  config->seed = d.seed;
  config->shuffle = d.shuffle ? 1 : 0;
  config->labeled = d.labeled ? 1 : 0;
  config->order = d.order == hexatag::BinarizationOrder::kLeftFirst ? HEXA_ORDER_LEFT_FIRST
                                                                    : HEXA_ORDER_RIGHT_FIRST;
  config->use_upos = d.use_upos ? 1 : 0;
  config->batch_size = d.batch_size;
  config->strict = d.strict ? 1 : 0;
}

hexa_status hexa_model_train(const hexa_corpus *corpus, const hexa_train_config *config,
                             hexa_model **out) {
  return Guard([&] {
    Require(corpus != nullptr && out != nullptr, "null argument");
    hexa_train_config defaults;
    hexa_train_config_init(&defaults);
    auto m = std::make_unique<hexa_model>();
    m->model = hexatag::Train(corpus->corpus, ToConfig(config ? *config : defaults));
    *out = m.release();
  });
}

hexa_status hexa_model_save(const hexa_model *model, const char *path) {
  return Guard([&] {
    Require(model != nullptr && path != nullptr, "null argument");
    hexatag::SaveModel(model->model, path);
  });
}

hexa_status hexa_model_load(const char *path, hexa_model **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    auto m = std::make_unique<hexa_model>();
    m->model = hexatag::LoadModel(path);
    *out = m.release();
  });
}

void hexa_model_free(hexa_model *model) { delete model; }

size_t hexa_model_loss_count(const hexa_model *model) {
  return model ? model->model.epoch_loss.size() : 0;
}

double hexa_model_loss(const hexa_model *model, size_t epoch) {
  if (model == nullptr || epoch >= model->model.epoch_loss.size()) return -1.0;
  return model->model.epoch_loss[epoch];
}

size_t hexa_model_skipped(const hexa_model *model) {
  return model ? static_cast<size_t>(model->model.skipped_sentences) : 0;
}

hexa_status hexa_model_vocab(const hexa_model *model, char **vocab_text) {
  return Guard([&] {
    Require(model != nullptr && vocab_text != nullptr, "null argument");
    *vocab_text = CopyString(model->model.vocab->ToText());
  });
}

hexa_status hexa_model_predict(const hexa_model *model, const hexa_corpus *corpus,
                               size_t max_depth, int jobs, hexa_corpus **out) {
  return Guard([&] {
    Require(model != nullptr && corpus != nullptr && out != nullptr, "null argument");
    auto c = std::make_unique<hexa_corpus>();
    c->corpus = hexatag::PredictCorpus(model->model, corpus->corpus, ToDepth(max_depth), jobs);
    *out = c.release();
  });
}

hexa_status hexa_model_export_scores(const hexa_model *model, const hexa_corpus *corpus,
                                     char **jsonl) {
  return Guard([&] {
    Require(model != nullptr && corpus != nullptr && jsonl != nullptr, "null argument");
    *jsonl = CopyString(hexatag::ExportScores(model->model, corpus->corpus));
  });
}

hexa_status hexa_evaluate(const hexa_corpus *gold, const hexa_corpus *pred, hexa_punct policy,
                          hexa_eval_summary *summary, char **text, char **json) {
  return Guard([&] {
    Require(gold != nullptr && pred != nullptr, "null argument");
    hexatag::PunctPolicy p = hexatag::PunctPolicy::kByUpos;
    switch (policy) {
      case HEXA_PUNCT_UPOS: p = hexatag::PunctPolicy::kByUpos; break;
      case HEXA_PUNCT_DEPREL: p = hexatag::PunctPolicy::kByDeprel; break;
      case HEXA_PUNCT_NONE: p = hexatag::PunctPolicy::kNone; break;
      default: hexatag::Fail(hexatag::ErrorCode::kInvalidArgument, "unknown punct policy");
    }
    hexatag::EvalReport report = hexatag::AttachmentScores(gold->corpus, pred->corpus, p);
    char *t = text ? CopyString(report.ToText()) : nullptr;
    char *j = nullptr;
    if (json != nullptr) {
      try {
        j = CopyString(report.ToJson());
      } catch (...) {
        std::free(t);
        throw;
      }
    }
    if (summary != nullptr) {
      summary->uas = report.uas;
      summary->las = report.las;
      summary->counted = static_cast<size_t>(report.counted_tokens);
      summary->excluded = static_cast<size_t>(report.excluded_tokens);
    }
    if (text) *text = t;
    if (json) *json = j;
  });
}

hexa_status hexa_verify(const hexa_corpus *corpus, hexa_order order, int jobs,
                        hexa_verify_summary *summary, char **report) {
  return Guard([&] {
    Require(corpus != nullptr, "null argument");
    hexatag::VerifySummary v = hexatag::VerifyCorpus(corpus->corpus, ToOrder(order), jobs);
    if (report != nullptr) {
      std::string text;
      for (const auto &r : v.rejects) {
        text += "reject sentence " + std::to_string(r.sentence) + ": " + r.reason + "\n";
      }
      for (const auto &m : v.mismatches) {
        text += "MISMATCH sentence " + std::to_string(m.sentence) + ": " + m.reason + "\n";
      }
      *report = CopyString(text);
    }
    if (summary != nullptr) {
      summary->verified = v.verified;
      summary->rejected = v.rejects.size();
      summary->mismatched = v.mismatches.size();
    }
  });
}

hexa_status hexa_bench(const int *lengths, size_t count, int batch, int runs, uint64_t seed,
                       size_t max_depth, char **json) {
  return Guard([&] {
    Require(lengths != nullptr && count > 0 && json != nullptr, "null argument");
    const int depth = ToDepth(max_depth);
    std::vector<int> ls(lengths, lengths + count);
    *json = CopyString(hexatag::BenchJson(hexatag::RunBench(ls, batch, runs, seed, depth), depth));
  });
}

}  // extern "C"
