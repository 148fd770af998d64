#include "hexatag/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "hexatag/error.h"
#include "hexatag/parallel.h"

namespace hexatag {
namespace {

bool IsContinuationByte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

// First / last `k` UTF-8 code points of s.
std::string CodepointPrefix(const std::string &s, int k) {
  size_t pos = 0;
  for (int seen = 0; pos < s.size(); ++pos) {
    if (!IsContinuationByte(s[pos]) && seen++ == k) break;
  }
  return s.substr(0, pos);
}

std::string CodepointSuffix(const std::string &s, int k) {
  size_t pos = s.size();
  int seen = 0;
  while (pos > 0 && seen < k) {
    --pos;
    if (!IsContinuationByte(s[pos])) ++seen;
  }
  return s.substr(pos);
}

int CodepointCount(const std::string &s) {
  int count = 0;
  for (char c : s) count += IsContinuationByte(c) ? 0 : 1;
  return count;
}

std::string Signed(int off) { return (off > 0 ? "+" : "") + std::to_string(off); }

std::string AsciiLower(std::string s) {
  for (char &c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// log-softmax of `logits` in place.
void LogSoftmax(std::span<double> logits) {
  double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - peak);
  double lse = peak + std::log(sum);
  for (double &v : logits) v -= lse;
}

void AccumulateLogits(const Matrix &weights, std::span<const int> features,
                      std::span<double> logits) {
  std::fill(logits.begin(), logits.end(), 0.0);
  for (int f : features) {
    auto row = weights.row(f);
    for (size_t c = 0; c < logits.size(); ++c) logits[c] += row[c];
  }
}

std::vector<std::vector<int>> SentenceFeatureIds(const FeatureDictionary &dict,
                                                 const std::vector<std::string> &forms,
                                                 const std::vector<std::string> &upos,
                                                 bool use_upos, bool grow,
                                                 FeatureDictionary *growable) {
  std::vector<std::vector<int>> ids(forms.size());
  for (size_t i = 0; i < forms.size(); ++i) {
    for (const std::string &name : WordFeatures(forms, upos, static_cast<int>(i), use_upos)) {
      int id = grow ? growable->Add(name) : dict.Find(name);
      if (id >= 0) ids[i].push_back(id);
    }
  }
  return ids;
}

// Gold-tag columns and feature ids for one training sentence.
struct Instance {
  std::vector<std::vector<int>> features;  // per word
  std::vector<int> terminal_gold;          // per word
  std::vector<int> nonterminal_gold;       // per word except the last
};

// Maps a gold tag sequence onto vocabulary columns; false if a tag is missing.
bool GoldColumns(const TagSequence &tags, const TagVocab &vocab, Instance *inst) {
  inst->terminal_gold.clear();
  inst->nonterminal_gold.clear();
  for (size_t i = 0; i < tags.size(); ++i) {
    auto column = i % 2 == 0 ? vocab.TerminalColumn(tags[i])
                             : vocab.NonterminalColumn(tags[i]);
    if (!column) return false;
    (i % 2 == 0 ? inst->terminal_gold : inst->nonterminal_gold).push_back(*column);
  }
  return true;
}

std::vector<std::string> Forms(const DepTree &tree) {
  std::vector<std::string> out;
  out.reserve(tree.tokens.size());
  for (const Token &t : tree.tokens) out.push_back(t.form);
  return out;
}

std::vector<std::string> Upos(const DepTree &tree) {
  std::vector<std::string> out;
  out.reserve(tree.tokens.size());
  for (const Token &t : tree.tokens) out.push_back(t.upos);
  return out;
}

// Sum of per-position losses over the instances and the position count.
std::pair<double, size_t> TotalLoss(const LinearTagModel &model,
                                    const std::vector<Instance> &instances) {
  double total = 0.0;
  size_t positions = 0;
  for (const Instance &inst : instances) {
    for (size_t w = 0; w < inst.features.size(); ++w) {
      total += PositionLoss(model.terminal_weights, inst.features[w], inst.terminal_gold[w]);
      ++positions;
      if (w < inst.nonterminal_gold.size()) {
        total += PositionLoss(model.nonterminal_weights, inst.features[w],
                              inst.nonterminal_gold[w]);
        ++positions;
      }
    }
  }
  return {total, positions};
}

std::vector<Instance> BuildInstances(const LinearTagModel &model, const Corpus &corpus) {
  std::vector<Instance> instances;
  for (const DepTree &tree : corpus.sentences) {
    if (!IsProjective(tree)) continue;
    Instance inst;
    if (!GoldColumns(Encode(tree, model.config.order, model.config.labeled), *model.vocab,
                     &inst)) {
      continue;
    }
    inst.features = SentenceFeatureIds(model.features, Forms(tree), Upos(tree),
                                       model.config.use_upos, false, nullptr);
    instances.push_back(std::move(inst));
  }
  return instances;
}

}  // namespace

std::vector<std::string> WordFeatures(const std::vector<std::string> &forms,
                                      const std::vector<std::string> &upos, int i,
                                      bool use_upos) {
  const int n = static_cast<int>(forms.size());
  auto form_at = [&](int j) -> std::string {
    if (j < 0) return "<s>";
    if (j >= n) return "</s>";
    return forms[j];
  };
  auto upos_at = [&](int j) -> std::string {
    if (j < 0) return "<s>";
    if (j >= n) return "</s>";
    return static_cast<size_t>(j) < upos.size() ? upos[j] : "_";
  };
  const std::string &form = forms[i];
  std::vector<std::string> f;
  f.reserve(24);
  f.push_back("bias");
  f.push_back("w=" + form);
  f.push_back("lw=" + AsciiLower(form));
  for (int off : {-2, -1, 1, 2}) {
    f.push_back("w" + Signed(off) + "=" + form_at(i + off));
  }
  if (use_upos) {
    f.push_back("p=" + upos_at(i));
    for (int off : {-2, -1, 1, 2}) {
      f.push_back("p" + Signed(off) + "=" + upos_at(i + off));
    }
    f.push_back("p-1p=" + upos_at(i - 1) + "|" + upos_at(i));
    f.push_back("pp+1=" + upos_at(i) + "|" + upos_at(i + 1));
  }
  int len = CodepointCount(form);
  for (int k = 1; k <= 3 && k <= len; ++k) {
    f.push_back("pre" + std::to_string(k) + "=" + CodepointPrefix(form, k));
    f.push_back("suf" + std::to_string(k) + "=" + CodepointSuffix(form, k));
  }
  if (i == 0) f.push_back("first");
  if (i == n - 1) f.push_back("last");
  if (i == n - 2) f.push_back("second-last");
  return f;
}

int FeatureDictionary::Add(const std::string &name) {
  auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

int FeatureDictionary::Find(const std::string &name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

LinearTagModel MakeModel(FeatureDictionary features, std::shared_ptr<const TagVocab> vocab,
                         const TrainConfig &config) {
  LinearTagModel model;
  model.features = std::move(features);
  model.vocab = std::move(vocab);
  model.config = config;
  model.config.labeled = model.vocab->labeled();
  model.terminal_weights = Matrix(model.features.size(), model.vocab->terminal_count());
  model.nonterminal_weights = Matrix(model.features.size(), TagVocab::kNonterminalCount);
  return model;
}

double PositionLoss(const Matrix &weights, std::span<const int> features, int gold,
                    Matrix *gradient) {
  std::vector<double> logits(weights.cols);
  AccumulateLogits(weights, features, logits);
  LogSoftmax(logits);
  double loss = -logits[gold];
  if (gradient != nullptr) {
    for (int f : features) {
      auto row = gradient->row(f);
      for (int c = 0; c < weights.cols; ++c) {
        row[c] += std::exp(logits[c]) - (c == gold ? 1.0 : 0.0);
      }
    }
  }
  return loss;
}

ScoreTable ScoreSentence(const LinearTagModel &model, const std::vector<std::string> &forms,
                         const std::vector<std::string> &upos) {
  if (forms.empty()) Fail(ErrorCode::kInvalidArgument, "cannot score an empty sentence");
  const int n = static_cast<int>(forms.size());
  auto ids = SentenceFeatureIds(model.features, forms, upos, model.config.use_upos, false,
                                nullptr);
  ScoreTable table;
  table.n = n;
  table.vocab = model.vocab;
  table.terminal = Matrix(n, model.vocab->terminal_count());
  table.nonterminal = Matrix(n - 1, TagVocab::kNonterminalCount);
  for (int w = 0; w < n; ++w) {
    auto row = table.terminal.row(w);
    AccumulateLogits(model.terminal_weights, ids[w], row);
    LogSoftmax(row);
    if (w < n - 1) {
      auto nrow = table.nonterminal.row(w);
      AccumulateLogits(model.nonterminal_weights, ids[w], nrow);
      LogSoftmax(nrow);
    }
  }
  return table;
}

ScoreTable ScoreSentence(const LinearTagModel &model, const DepTree &sentence) {
  return ScoreSentence(model, Forms(sentence), Upos(sentence));
}

LinearTagModel Train(const Corpus &corpus, const TrainConfig &config) {
  if (config.epochs < 1) Fail(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "learning rate must be > 0");
  }
  if (config.l2 < 0.0) Fail(ErrorCode::kInvalidArgument, "L2 strength must be >= 0");
  if (config.batch_size < 1) Fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");

  int skipped = 0;
  Corpus usable;
  for (size_t s = 0; s < corpus.sentences.size(); ++s) {
    const DepTree &tree = corpus.sentences[s];
    if (IsProjective(tree)) {
      usable.sentences.push_back(tree);
    } else if (config.strict) {
      Fail(ErrorCode::kNonProjective,
           "training sentence " + std::to_string(s + 1) + " is non-projective");
    } else {
      ++skipped;
    }
  }
  if (usable.sentences.empty()) {
    Fail(ErrorCode::kInvalidArgument, "training corpus has no projective sentences");
  }

  auto vocab = std::make_shared<const TagVocab>(TagVocab::FromCorpus(usable, config.labeled));
  FeatureDictionary dict;
  for (const DepTree &tree : usable.sentences) {
    SentenceFeatureIds(dict, Forms(tree), Upos(tree), config.use_upos, true, &dict);
  }
  LinearTagModel model = MakeModel(std::move(dict), vocab, config);
  model.skipped_sentences = skipped;
  std::vector<Instance> instances = BuildInstances(model, usable);

  auto mean_loss = [&]() {
    auto [total, positions] = TotalLoss(model, instances);
    return positions == 0 ? 0.0 : total / static_cast<double>(positions);
  };
  model.epoch_loss.push_back(mean_loss());

  Matrix term_grad(model.terminal_weights.rows, model.terminal_weights.cols);
  Matrix nonterm_grad(model.nonterminal_weights.rows, model.nonterminal_weights.cols);
  std::vector<char> touched_mark(model.features.size(), 0);
  std::vector<int> touched;

  std::vector<size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  const double decay = 1.0 - config.learning_rate * config.l2;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      size_t end = std::min(order.size(), start + config.batch_size);
      size_t positions = 0;
      for (size_t k = start; k < end; ++k) {
        const Instance &inst = instances[order[k]];
        for (size_t w = 0; w < inst.features.size(); ++w) {
          for (int f : inst.features[w]) {
            if (!touched_mark[f]) {
              touched_mark[f] = 1;
              touched.push_back(f);
            }
          }
          PositionLoss(model.terminal_weights, inst.features[w], inst.terminal_gold[w],
                       &term_grad);
          ++positions;
          if (w < inst.nonterminal_gold.size()) {
            PositionLoss(model.nonterminal_weights, inst.features[w],
                         inst.nonterminal_gold[w], &nonterm_grad);
            ++positions;
          }
        }
      }
      if (config.l2 > 0.0) {
        for (double &v : model.terminal_weights.data) v *= decay;
        for (double &v : model.nonterminal_weights.data) v *= decay;
      }
      const double step = config.learning_rate / static_cast<double>(positions);
      for (int f : touched) {
        auto w_t = model.terminal_weights.row(f);
        auto g_t = term_grad.row(f);
        for (size_t c = 0; c < w_t.size(); ++c) {
          w_t[c] -= step * g_t[c];
          g_t[c] = 0.0;
        }
        auto w_n = model.nonterminal_weights.row(f);
        auto g_n = nonterm_grad.row(f);
        for (size_t c = 0; c < w_n.size(); ++c) {
          w_n[c] -= step * g_n[c];
          g_n[c] = 0.0;
        }
        touched_mark[f] = 0;
      }
      touched.clear();
    }
    model.epoch_loss.push_back(mean_loss());
  }
  return model;
}

double CorpusLoss(const LinearTagModel &model, const Corpus &corpus) {
  auto [total, positions] = TotalLoss(model, BuildInstances(model, corpus));
  return positions == 0 ? 0.0 : total / static_cast<double>(positions);
}

Corpus PredictCorpus(const LinearTagModel &model, const Corpus &sentences, int max_depth,
                     int jobs) {
  Corpus out;
  out.provenance = sentences.provenance;
  out.sentences.resize(sentences.sentences.size());
  ParallelFor(sentences.sentences.size(), jobs, [&](size_t s) {
    const DepTree &input = sentences.sentences[s];
    auto forms = Forms(input);
    DecodeResult best = ViterbiDecode(ScoreSentence(model, forms, Upos(input)), max_depth);
    DepTree tree = Decode(best.tags, forms);
    for (size_t i = 0; i < tree.tokens.size(); ++i) tree.tokens[i].upos = input.tokens[i].upos;
    out.sentences[s] = std::move(tree);
  });
  return out;
}

std::string ExportScores(const LinearTagModel &model, const Corpus &sentences) {
  std::string out;
  for (const DepTree &tree : sentences.sentences) {
    out += ScoreJsonLine(Forms(tree), ScoreSentence(model, tree));
    out += '\n';
  }
  return out;
}

// Model file layout: the header line "hexa-model/1\n" followed by
// little-endian binary fields:
//   i32 epochs, u64 seed, u8 labeled, u8 order, u8 use_upos, u8 shuffle,
//   f64 learning_rate, f64 l2, i32 batch_size, i32 skipped_sentences,
//   str vocabulary text, u32 feature count + str per feature,
//   matrix terminal weights, matrix nonterminal weights,
//   u32 loss count + f64 per entry, then the trailer "end\n".
// str = u32 byte length + bytes; matrix = u32 rows, u32 cols, f64 row-major.
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written in little-endian byte order");

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out_.append(bytes, sizeof(T));
  }
  void PutString(std::string_view s) {
    Put<uint32_t>(static_cast<uint32_t>(s.size()));
    out_.append(s);
  }
  void PutMatrix(const Matrix &m) {
    Put<uint32_t>(static_cast<uint32_t>(m.rows));
    Put<uint32_t>(static_cast<uint32_t>(m.cols));
    out_.append(reinterpret_cast<const char *>(m.data.data()), m.data.size() * sizeof(double));
  }
  void Raw(std::string_view s) { out_.append(s); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string GetString() {
    uint32_t size = Get<uint32_t>();
    Need(size);
    std::string s(bytes_.substr(pos_, size));
    pos_ += size;
    return s;
  }
  Matrix GetMatrix() {
    uint32_t rows = Get<uint32_t>();
    uint32_t cols = Get<uint32_t>();
    size_t count = static_cast<size_t>(rows) * cols;
    if (cols != 0 && count / cols != rows) Corrupt("matrix size overflow");
    Need(count * sizeof(double));
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    std::memcpy(m.data.data(), bytes_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
    return m;
  }
  void Expect(std::string_view literal) {
    Need(literal.size());
    if (bytes_.substr(pos_, literal.size()) != literal) Corrupt("bad trailer");
    pos_ += literal.size();
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

  [[noreturn]] static void Corrupt(const std::string &why) {
    Fail(ErrorCode::kModelFormat, "corrupt model file: " + why);
  }

 private:
  void Need(size_t count) {
    if (bytes_.size() - pos_ < count) Corrupt("truncated");
  }

  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeModel(const LinearTagModel &model) {
  Writer w;
  w.Raw(kModelHeader);
  w.Raw("\n");
  const TrainConfig &c = model.config;
  w.Put<int32_t>(c.epochs);
  w.Put<uint64_t>(c.seed);
  w.Put<uint8_t>(c.labeled ? 1 : 0);
  w.Put<uint8_t>(c.order == BinarizationOrder::kLeftFirst ? 0 : 1);
  w.Put<uint8_t>(c.use_upos ? 1 : 0);
  w.Put<uint8_t>(c.shuffle ? 1 : 0);
  w.Put<double>(c.learning_rate);
  w.Put<double>(c.l2);
  w.Put<int32_t>(c.batch_size);
  w.Put<int32_t>(model.skipped_sentences);
  w.PutString(model.vocab->ToText());
  w.Put<uint32_t>(static_cast<uint32_t>(model.features.size()));
  for (int f = 0; f < model.features.size(); ++f) w.PutString(model.features.name(f));
  w.PutMatrix(model.terminal_weights);
  w.PutMatrix(model.nonterminal_weights);
  w.Put<uint32_t>(static_cast<uint32_t>(model.epoch_loss.size()));
  for (double v : model.epoch_loss) w.Put<double>(v);
  w.Raw("end\n");
  return w.Take();
}

LinearTagModel DeserializeModel(std::string_view bytes) {
  size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) Reader::Corrupt("missing header");
  std::string_view header = bytes.substr(0, eol);
  if (header.substr(0, 11) != "hexa-model/") Reader::Corrupt("missing header");
  if (header != kModelHeader) {
    Fail(ErrorCode::kModelFormat, "unsupported model format '" + std::string(header) +
                                      "', expected '" + std::string(kModelHeader) + "'");
  }
  Reader r(bytes.substr(eol + 1));
  TrainConfig c;
  c.epochs = r.Get<int32_t>();
  c.seed = r.Get<uint64_t>();
  c.labeled = r.Get<uint8_t>() != 0;
  c.order = r.Get<uint8_t>() == 0 ? BinarizationOrder::kLeftFirst
                                  : BinarizationOrder::kRightFirst;
  c.use_upos = r.Get<uint8_t>() != 0;
  c.shuffle = r.Get<uint8_t>() != 0;
  c.learning_rate = r.Get<double>();
  c.l2 = r.Get<double>();
  c.batch_size = r.Get<int32_t>();
  int skipped = r.Get<int32_t>();

  std::shared_ptr<const TagVocab> vocab;
  try {
    vocab = std::make_shared<const TagVocab>(TagVocab::Parse(r.GetString()));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kModelFormat) throw;
    Reader::Corrupt(std::string("vocabulary: ") + e.what());
  }
  FeatureDictionary dict;
  uint32_t feature_count = r.Get<uint32_t>();
  for (uint32_t f = 0; f < feature_count; ++f) {
    if (dict.Add(r.GetString()) != static_cast<int>(f)) Reader::Corrupt("duplicate feature");
  }
  LinearTagModel model;
  model.features = std::move(dict);
  model.vocab = std::move(vocab);
  model.config = c;
  model.skipped_sentences = skipped;
  model.terminal_weights = r.GetMatrix();
  model.nonterminal_weights = r.GetMatrix();
  if (model.terminal_weights.rows != model.features.size() ||
      model.terminal_weights.cols != model.vocab->terminal_count() ||
      model.nonterminal_weights.rows != model.features.size() ||
      model.nonterminal_weights.cols != TagVocab::kNonterminalCount) {
    Reader::Corrupt("weight shapes do not match the dictionaries");
  }
  uint32_t losses = r.Get<uint32_t>();
  for (uint32_t e = 0; e < losses; ++e) model.epoch_loss.push_back(r.Get<double>());
  r.Expect("end\n");
  if (!r.AtEnd()) Reader::Corrupt("trailing bytes");
  return model;
}

void SaveModel(const LinearTagModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  std::string bytes = SerializeModel(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "error writing " + path);
}

LinearTagModel LoadModel(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str());
}

}  // namespace hexatag
