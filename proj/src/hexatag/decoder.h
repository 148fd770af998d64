#ifndef HEXATAG_DECODER_H_
#define HEXATAG_DECODER_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexatag/codec.h"

namespace hexatag {

// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double &at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  std::span<double> row(int r) {
    return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
  }
  std::span<const double> row(int r) const {
    return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
  }
};

// Per-sentence log-scores. Terminal row r scores tag position 2r+1 and
// nonterminal row r scores position 2r+2 (0-based rows, 1-based positions),
// i.e. word r+1 owns both. Columns follow the vocabulary's column order.
struct ScoreTable {
  int n = 0;
  Matrix terminal;     // n x vocab->terminal_count()
  Matrix nonterminal;  // (n-1) x 4
  std::shared_ptr<const TagVocab> vocab;
};

// Throws kInvalidArgument on shape mismatches or non-finite entries.
void ValidateScoreTable(const ScoreTable &scores);

struct DecodeResult {
  TagSequence tags;
  double log_score = 0.0;
  // Stack depth after each tag.
  std::vector<int> depth_profile;
};

// Best valid tag sequence over the (position x stack depth) lattice. The
// lattice keeps depths 0..d with d = max_depth clamped to n; max_depth <= 0
// selects d = n, which is exact. Ties go to the smallest tag id at the
// earliest differing position. Time O(n * d + n * |terminal vocab|).
DecodeResult ViterbiDecode(const ScoreTable &scores, int max_depth = 0);

// Exhaustive search over all parity-respecting sequences, n <= 6.
DecodeResult BruteForceDecode(const ScoreTable &scores);

// Sum of the entries selected by `tags`. Throws kInvalidArgument if a tag is
// missing from the vocabulary or the length does not match.
double ScoreOf(const TagSequence &tags, const ScoreTable &scores);

// Score-table interchange: one JSON object per line,
// {"tokens": [...], "terminal_scores": [[...]], "nonterminal_scores": [[...]]}.
struct ScoredSentence {
  std::vector<std::string> tokens;
  ScoreTable scores;
};

std::vector<ScoredSentence> ParseScoreJsonl(std::string_view text,
                                            std::shared_ptr<const TagVocab> vocab);
std::string ScoreJsonLine(const std::vector<std::string> &tokens,
                          const ScoreTable &scores);

}  // namespace hexatag

#endif  // HEXATAG_DECODER_H_
