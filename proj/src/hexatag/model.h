#ifndef HEXATAG_MODEL_H_
#define HEXATAG_MODEL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hexatag/decoder.h"
#include "hexatag/treebank.h"

namespace hexatag {

// Indicator features of word `i` (0-based): form, lowercased form, UPOS,
// forms and UPOS within a +-2 window, UPOS bigrams around the word, form
// prefixes and suffixes up to three characters, and sentence-boundary
// markers. UPOS features are dropped when use_upos is false.
std::vector<std::string> WordFeatures(const std::vector<std::string> &forms,
                                      const std::vector<std::string> &upos, int i,
                                      bool use_upos);

class FeatureDictionary {
 public:
  int Add(const std::string &name);
  // -1 for unknown features.
  int Find(const std::string &name) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::string &name(int id) const { return names_[id]; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

struct TrainConfig {
  int epochs = 15;
  double learning_rate = 1.0;
  double l2 = 1e-7;
  uint64_t seed = 1;
  bool shuffle = true;
  bool labeled = true;
  BinarizationOrder order = BinarizationOrder::kLeftFirst;
  bool use_upos = true;
  int batch_size = 8;  // sentences per update
  bool strict = false;  // non-projective sentences are errors, not skips
};

// Two linear softmax heads over shared sparse features: one scores terminal
// tags, the other the four nonterminal tags.
struct LinearTagModel {
  FeatureDictionary features;
  std::shared_ptr<const TagVocab> vocab;
  Matrix terminal_weights;     // features x terminal vocab
  Matrix nonterminal_weights;  // features x 4
  TrainConfig config;
  // Mean loss per tag position: entry 0 before training, entry e after
  // epoch e.
  std::vector<double> epoch_loss;
  int skipped_sentences = 0;
};

// An untrained model with all-zero weights over the given inventory.
LinearTagModel MakeModel(FeatureDictionary features, std::shared_ptr<const TagVocab> vocab,
                         const TrainConfig &config = {});

// Cross-entropy -log softmax(W^T x)[gold] for one position, where x is the
// indicator vector of `features` (ids may repeat). When gradient is given,
// dLoss/dW is added to the rows of the active features.
double PositionLoss(const Matrix &weights, std::span<const int> features, int gold,
                    Matrix *gradient = nullptr);

// Log-softmax score table for one sentence; unknown features are ignored.
ScoreTable ScoreSentence(const LinearTagModel &model,
                         const std::vector<std::string> &forms,
                         const std::vector<std::string> &upos);
ScoreTable ScoreSentence(const LinearTagModel &model, const DepTree &sentence);

LinearTagModel Train(const Corpus &corpus, const TrainConfig &config);

// Mean per-position loss of `model` on the projective sentences of `corpus`.
double CorpusLoss(const LinearTagModel &model, const Corpus &corpus);

// score -> decode -> tree for every sentence; forms and UPOS are kept.
Corpus PredictCorpus(const LinearTagModel &model, const Corpus &sentences,
                     int max_depth = 0, int jobs = 1);

// JSON Lines score tables, one per sentence.
std::string ExportScores(const LinearTagModel &model, const Corpus &sentences);

// Versioned binary format, see README. Throws kModelFormat for corrupt or
// mismatched files and kIo for file system errors.
std::string SerializeModel(const LinearTagModel &model);
LinearTagModel DeserializeModel(std::string_view bytes);
void SaveModel(const LinearTagModel &model, const std::string &path);
LinearTagModel LoadModel(const std::string &path);

inline constexpr std::string_view kModelHeader = "hexa-model/1";

}  // namespace hexatag

#endif  // HEXATAG_MODEL_H_
