#ifndef HEXATAG_EVAL_H_
#define HEXATAG_EVAL_H_

#include <string>
#include <vector>

#include "hexatag/treebank.h"

namespace hexatag {

// Which gold tokens count as punctuation and are left out of the scores.
enum class PunctPolicy { kByUpos, kByDeprel, kNone };

struct SentenceScore {
  int counted = 0;
  int excluded = 0;
  int correct_heads = 0;
  int correct_labeled = 0;
};

struct EvalReport {
  double uas = 0.0;  // percent
  double las = 0.0;  // percent
  int counted_tokens = 0;
  int excluded_tokens = 0;
  std::vector<SentenceScore> sentences;

  std::string ToText() const;
  std::string ToJson() const;
};

// Throws kAlignment naming the sentence and token when the corpora differ in
// sentence count, length, or word forms. With nothing counted, both scores
// are 100.
EvalReport AttachmentScores(const Corpus &gold, const Corpus &pred,
                            PunctPolicy policy = PunctPolicy::kByUpos);

}  // namespace hexatag

#endif  // HEXATAG_EVAL_H_
