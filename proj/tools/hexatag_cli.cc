// hexatag command-line tool. Everything goes through the C API in
// <hexatag/hexatag.h>; this file only does argument handling, file plumbing
// and exit codes.
//
// Exit codes: 0 success, 1 I/O or input error, 2 some sentences rejected by
// encode, 3 internal-consistency failure (round-trip mismatch).

#include <hexatag/hexatag.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitRejects = 2;
constexpr int kExitInternal = 3;

// Thrown out of subcommand handlers; caught once in main.
struct CliFailure {
  int exit_code;
  std::string message;
};

[[noreturn]] void Die(hexa_status st, const std::string &context = {}) {
  std::string msg = hexa_last_error();
  if (!context.empty()) msg = context + ": " + msg;
  throw CliFailure{st == HEXA_E_INTERNAL ? kExitInternal : kExitError, msg};
}

void Check(hexa_status st, const std::string &context = {}) {
  if (st != HEXA_OK) Die(st, context);
}

struct StringDeleter {
  void operator()(char *s) const { hexa_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct HandleDeleter {
  void operator()(hexa_corpus *c) const { hexa_corpus_free(c); }
  void operator()(hexa_vocab *v) const { hexa_vocab_free(v); }
  void operator()(hexa_model *m) const { hexa_model_free(m); }
  void operator()(hexa_parse *p) const { hexa_parse_free(p); }
};
using Corpus = std::unique_ptr<hexa_corpus, HandleDeleter>;
using Vocab = std::unique_ptr<hexa_vocab, HandleDeleter>;
using Model = std::unique_ptr<hexa_model, HandleDeleter>;
using Parse = std::unique_ptr<hexa_parse, HandleDeleter>;

std::string Take(char *s) {
  CString owned(s);
  return s ? std::string(s) : std::string();
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure{kExitError, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw CliFailure{kExitError, "error reading " + path};
  return buf.str();
}

Corpus ReadCorpus(const std::string &path) {
  hexa_corpus *c = nullptr;
  Check(hexa_corpus_read(path.c_str(), &c));
  return Corpus(c);
}

Model LoadModel(const std::string &path) {
  hexa_model *m = nullptr;
  Check(hexa_model_load(path.c_str(), &m));
  return Model(m);
}

// Destination for results: stdout when no path is given. Files are opened
// up front so an unwritable path fails before any work is done.
class Output {
 public:
  explicit Output(const std::string &path) : path_(path) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw CliFailure{kExitError, "cannot write " + path_};
    }
  }

  void Write(const std::string &text) {
    std::ostream &os = path_.empty() ? std::cout : file_;
    os << text;
    os.flush();
    if (!os) throw CliFailure{kExitError, "error writing " + (path_.empty() ? "stdout" : path_)};
  }

 private:
  std::string path_;
  std::ofstream file_;
};

// Options shared by all subcommands. They live on the root app so that a
// flat key=value config file can set any of them.
struct Shared {
  std::string order = "left";
  bool labeled = false;
  bool unlabeled = false;
  size_t max_depth = hexa_default_depth_cap();
  std::string punct = "upos";
  uint64_t seed = 1;
  int jobs = 1;
  // training
  int epochs = 0;
  double learning_rate = 0.0;
  double l2 = -1.0;
  int minibatch = 0;
  bool no_upos = false;
  bool no_shuffle = false;
  bool strict = false;
  // bench
  std::vector<int> lengths = {32, 64, 128, 256};
  int batch = 1000;
  int runs = 3;

  hexa_order Order() const {
    return order == "right" ? HEXA_ORDER_RIGHT_FIRST : HEXA_ORDER_LEFT_FIRST;
  }
  // --labeled / --unlabeled override the per-subcommand default.
  bool Labeled(bool fallback) const {
    if (labeled) return true;
    if (unlabeled) return false;
    return fallback;
  }
  hexa_punct Punct() const {
    if (punct == "deprel") return HEXA_PUNCT_DEPREL;
    if (punct == "none") return HEXA_PUNCT_NONE;
    return HEXA_PUNCT_UPOS;
  }
};

// ---- encode ----

struct EncodeArgs {
  std::string input, output, rejects;
};

int RunEncode(const Shared &sh, const EncodeArgs &a) {
  std::string rejects_path = a.rejects;
  if (rejects_path.empty() && !a.output.empty()) rejects_path = a.output + ".rejects";
  Output out(a.output);
  std::unique_ptr<Output> rej;
  if (!rejects_path.empty()) rej = std::make_unique<Output>(rejects_path);

  Corpus corpus = ReadCorpus(a.input);
  char *tags = nullptr;
  char *rejects = nullptr;
  size_t rejected = 0;
  Check(hexa_encode_corpus(corpus.get(), sh.Order(), sh.Labeled(false) ? 1 : 0, sh.jobs, &tags,
                           &rejects, &rejected));
  const std::string tag_text = Take(tags);
  const std::string reject_text = Take(rejects);
  out.Write(tag_text);
  if (rej) {
    rej->Write(reject_text);
  } else if (!reject_text.empty()) {
    std::cerr << reject_text;
  }
  if (rejected > 0) {
    std::cerr << "hexatag: " << rejected << " non-projective sentence(s) rejected";
    if (!rejects_path.empty()) std::cerr << " (see " << rejects_path << ")";
    std::cerr << "\n";
    return kExitRejects;
  }
  return kExitOk;
}

// ---- decode ----

struct DecodeArgs {
  std::string input, output, vocab, model;
};

bool LooksLikeJson(const std::string &text) {
  size_t p = text.find_first_not_of(" \t\r\n");
  return p != std::string::npos && text[p] == '{';
}

Vocab DecodeVocab(const DecodeArgs &a) {
  hexa_vocab *v = nullptr;
  if (!a.vocab.empty()) {
    std::string text = ReadFile(a.vocab);
    Check(hexa_vocab_parse(text.data(), text.size(), &v), a.vocab);
  } else if (!a.model.empty()) {
    Model m = LoadModel(a.model);
    std::string text = Take([&] {
      char *s = nullptr;
      Check(hexa_model_vocab(m.get(), &s));
      return s;
    }());
    Check(hexa_vocab_parse(text.data(), text.size(), &v));
  } else {
    throw CliFailure{kExitError, "score input needs --vocab or --model"};
  }
  return Vocab(v);
}

int RunDecode(const Shared &sh, const DecodeArgs &a) {
  Output out(a.output);
  const std::string text = ReadFile(a.input);

  if (LooksLikeJson(text)) {
    Vocab vocab = DecodeVocab(a);
    hexa_corpus *c = nullptr;
    Check(hexa_decode_score_jsonl(vocab.get(), text.data(), text.size(), sh.max_depth, sh.jobs,
                                  &c),
          a.input);
    Corpus corpus(c);
    char *conllu = nullptr;
    Check(hexa_corpus_write(corpus.get(), &conllu));
    out.Write(Take(conllu));
    return kExitOk;
  }

  // One tag sequence per line; blank lines are ignored.
  std::istringstream lines(text);
  std::string line, result;
  for (size_t line_no = 1; std::getline(lines, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    hexa_parse *p = nullptr;
    Check(hexa_decode_tags(line.c_str(), nullptr, 0, &p), a.input + ": line " + std::to_string(line_no));
    Parse parse(p);
    char *conllu = nullptr;
    Check(hexa_parse_to_conllu(parse.get(), &conllu));
    result += Take(conllu);
  }
  out.Write(result);
  return kExitOk;
}

// ---- train / predict ----

struct TrainArgs {
  std::string input, model, losses;
};

int RunTrain(const Shared &sh, const TrainArgs &a) {
  // Validate the destination before spending time on training.
  { Output probe(a.model); }
  std::unique_ptr<Output> losses;
  if (!a.losses.empty()) losses = std::make_unique<Output>(a.losses);

  Corpus corpus = ReadCorpus(a.input);
  hexa_train_config cfg;
  hexa_train_config_init(&cfg);
  cfg.seed = sh.seed;
  cfg.order = sh.Order();
  cfg.labeled = sh.Labeled(cfg.labeled != 0) ? 1 : 0;
  if (sh.epochs > 0) cfg.epochs = sh.epochs;
  if (sh.learning_rate > 0.0) cfg.learning_rate = sh.learning_rate;
  if (sh.l2 >= 0.0) cfg.l2 = sh.l2;
  if (sh.minibatch > 0) cfg.batch_size = sh.minibatch;
  if (sh.no_upos) cfg.use_upos = 0;
  if (sh.no_shuffle) cfg.shuffle = 0;
  if (sh.strict) cfg.strict = 1;

  hexa_model *m = nullptr;
  Check(hexa_model_train(corpus.get(), &cfg, &m), a.input);
  Model model(m);
  Check(hexa_model_save(model.get(), a.model.c_str()));

  std::string loss_text;
  for (size_t e = 0; e < hexa_model_loss_count(model.get()); ++e) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "epoch %zu loss %.6f\n", e, hexa_model_loss(model.get(), e));
    loss_text += buf;
  }
  if (losses) losses->Write(loss_text);
  std::cerr << loss_text;
  if (size_t skipped = hexa_model_skipped(model.get()); skipped > 0) {
    std::cerr << "hexatag: skipped " << skipped << " non-projective sentence(s)\n";
  }
  return kExitOk;
}

struct PredictArgs {
  std::string model, input, output, scores;
};

int RunPredict(const Shared &sh, const PredictArgs &a) {
  Output out(a.output);
  std::unique_ptr<Output> scores;
  if (!a.scores.empty()) scores = std::make_unique<Output>(a.scores);

  Model model = LoadModel(a.model);
  Corpus input = ReadCorpus(a.input);
  if (scores) {
    char *jsonl = nullptr;
    Check(hexa_model_export_scores(model.get(), input.get(), &jsonl));
    scores->Write(Take(jsonl));
  }
  hexa_corpus *p = nullptr;
  Check(hexa_model_predict(model.get(), input.get(), sh.max_depth, sh.jobs, &p));
  Corpus pred(p);
  char *conllu = nullptr;
  Check(hexa_corpus_write(pred.get(), &conllu));
  out.Write(Take(conllu));
  return kExitOk;
}

// ---- eval ----

struct EvalArgs {
  std::string gold, pred, output;
  bool json = false;
};

int RunEval(const Shared &sh, const EvalArgs &a) {
  Output out(a.output);
  Corpus gold = ReadCorpus(a.gold);
  Corpus pred = ReadCorpus(a.pred);
  hexa_eval_summary summary{};
  char *text = nullptr;
  char *json = nullptr;
  Check(hexa_evaluate(gold.get(), pred.get(), sh.Punct(), &summary, &text, &json));
  std::string t = Take(text), j = Take(json);
  out.Write(a.json ? j + "\n" : t);
  return kExitOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string input;
};

int RunVerify(const Shared &sh, const VerifyArgs &a) {
  Corpus corpus = ReadCorpus(a.input);
  hexa_verify_summary s{};
  char *report = nullptr;
  Check(hexa_verify(corpus.get(), sh.Order(), sh.jobs, &s, &report));
  std::cerr << Take(report);
  std::cout << "verified " << s.verified << ", rejected " << s.rejected << ", mismatched "
            << s.mismatched << "\n";
  if (s.mismatched > 0) return kExitInternal;
  if (s.rejected > 0) {
    std::cerr << "warning: " << s.rejected << " non-projective sentence(s) not checked\n";
  }
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  std::string output;
};

int RunBench(const Shared &sh, const BenchArgs &a) {
  Output out(a.output);
  char *json = nullptr;
  Check(hexa_bench(sh.lengths.data(), sh.lengths.size(), sh.batch, sh.runs, sh.seed, sh.max_depth,
                   &json));
  out.Write(Take(json) + "\n");
  return kExitOk;
}

// ---- vocab ----

struct VocabArgs {
  std::string input, model, output;
};

int RunVocab(const Shared &sh, const VocabArgs &a) {
  Output out(a.output);
  char *text = nullptr;
  if (!a.model.empty()) {
    Model m = LoadModel(a.model);
    Check(hexa_model_vocab(m.get(), &text));
  } else if (!a.input.empty()) {
    Corpus corpus = ReadCorpus(a.input);
    hexa_vocab *v = nullptr;
    Check(hexa_vocab_from_corpus(corpus.get(), sh.Labeled(true) ? 1 : 0, &v));
    Vocab vocab(v);
    Check(hexa_vocab_write(vocab.get(), &text));
  } else {
    hexa_vocab *v = nullptr;
    Check(hexa_vocab_unlabeled(&v));
    Vocab vocab(v);
    Check(hexa_vocab_write(vocab.get(), &text));
  }
  out.Write(Take(text));
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"hexatag: projective dependency parsing with hexatags"};
  app.set_version_flag("--version", std::string(hexa_version()));
  app.require_subcommand(1);
  app.fallthrough();  // shared flags may follow the subcommand name
  app.allow_config_extras(false);
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

  Shared sh;
  app.add_option("--order", sh.order, "Binarization order")
      ->check(CLI::IsMember({"left", "right"}))
      ->capture_default_str();
  auto *labeled = app.add_flag("--labeled", sh.labeled, "Attach dependency labels to tags");
  app.add_flag("--unlabeled", sh.unlabeled, "Drop dependency labels")->excludes(labeled);
  app.add_option("--max-depth", sh.max_depth, "Decoder stack depth cap (0 = exact)")
      ->capture_default_str();
  app.add_option("--punct", sh.punct, "Tokens excluded from scoring")
      ->check(CLI::IsMember({"upos", "deprel", "none"}))
      ->capture_default_str();
  app.add_option("--seed", sh.seed, "Random seed")->capture_default_str();
  app.add_option("--jobs", sh.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--epochs", sh.epochs, "Training epochs")->check(CLI::PositiveNumber);
  app.add_option("--learning-rate", sh.learning_rate, "SGD step size")->check(CLI::PositiveNumber);
  app.add_option("--l2", sh.l2, "L2 penalty")->check(CLI::NonNegativeNumber);
  app.add_option("--minibatch", sh.minibatch, "Sentences per SGD update")->check(CLI::PositiveNumber);
  app.add_flag("--no-upos", sh.no_upos, "Do not use UPOS features");
  app.add_flag("--no-shuffle", sh.no_shuffle, "Keep corpus order during training");
  app.add_flag("--strict", sh.strict, "Fail on non-projective training sentences");
  app.add_option("--lengths", sh.lengths, "Bench sentence lengths")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--batch", sh.batch, "Bench sentences per length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--runs", sh.runs, "Bench repetitions")->check(CLI::PositiveNumber)->capture_default_str();

  int exit_code = kExitOk;
  std::function<int()> action;

  EncodeArgs enc;
  auto *encode = app.add_subcommand("encode", "CoNLL-U to hexatag lines");
  encode->add_option("input", enc.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  encode->add_option("-o,--output", enc.output, "Tag file (default stdout)");
  encode->add_option("--rejects", enc.rejects, "Rejects file (default OUTPUT.rejects)");
  encode->callback([&] { action = [&] { return RunEncode(sh, enc); }; });

  DecodeArgs dec;
  auto *decode = app.add_subcommand("decode", "Tag lines or score JSONL to CoNLL-U");
  decode->add_option("input", dec.input, "Tag lines or score JSONL")->required()->check(CLI::ExistingFile);
  decode->add_option("-o,--output", dec.output, "CoNLL-U file (default stdout)");
  auto *dv = decode->add_option("--vocab", dec.vocab, "Tag vocabulary for score input")->check(CLI::ExistingFile);
  decode->add_option("--model", dec.model, "Take the vocabulary from a model")
      ->check(CLI::ExistingFile)
      ->excludes(dv);
  decode->callback([&] { action = [&] { return RunDecode(sh, dec); }; });

  TrainArgs tr;
  auto *train = app.add_subcommand("train", "Train a tagger on a CoNLL-U treebank");
  train->add_option("input", tr.input, "Training treebank")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--output", tr.model, "Model file")->required();
  train->add_option("--losses", tr.losses, "Write per-epoch losses here");
  train->callback([&] { action = [&] { return RunTrain(sh, tr); }; });

  PredictArgs pr;
  auto *predict = app.add_subcommand("predict", "Parse a CoNLL-U file with a trained model");
  predict->add_option("model", pr.model, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_option("input", pr.input, "CoNLL-U input")->required()->check(CLI::ExistingFile);
  predict->add_option("-o,--output", pr.output, "CoNLL-U output (default stdout)");
  predict->add_option("--scores", pr.scores, "Also write score JSONL here");
  predict->callback([&] { action = [&] { return RunPredict(sh, pr); }; });

  EvalArgs ev;
  auto *eval = app.add_subcommand("eval", "Attachment scores of a prediction against gold");
  eval->add_option("gold", ev.gold, "Gold CoNLL-U")->required()->check(CLI::ExistingFile);
  eval->add_option("pred", ev.pred, "Predicted CoNLL-U")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--output", ev.output, "Report file (default stdout)");
  eval->add_flag("--json", ev.json, "Machine-readable report");
  eval->callback([&] { action = [&] { return RunEval(sh, ev); }; });

  VerifyArgs ve;
  auto *verify = app.add_subcommand("verify", "Check decode(encode(t)) == t on a treebank");
  verify->add_option("input", ve.input, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  verify->callback([&] { action = [&] { return RunVerify(sh, ve); }; });

  BenchArgs be;
  auto *bench = app.add_subcommand("bench", "Decoding throughput on synthetic scores");
  bench->add_option("-o,--output", be.output, "JSON report (default stdout)");
  bench->callback([&] { action = [&] { return RunBench(sh, be); }; });

  VocabArgs vo;
  auto *vocab = app.add_subcommand("vocab", "Print a tag vocabulary");
  auto *vi = vocab->add_option("input", vo.input, "Treebank to collect labels from")->check(CLI::ExistingFile);
  vocab->add_option("--model", vo.model, "Print the vocabulary of this model")
      ->check(CLI::ExistingFile)
      ->excludes(vi);
  vocab->add_option("-o,--output", vo.output, "Vocabulary file (default stdout)");
  vocab->callback([&] { action = [&] { return RunVocab(sh, vo); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    exit_code = action ? action() : kExitError;
  } catch (const CliFailure &f) {
    std::cerr << "hexatag: error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception &e) {
    std::cerr << "hexatag: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return exit_code;
}
