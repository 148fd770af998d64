#ifndef HEXATAG_WORKFLOWS_H_
#define HEXATAG_WORKFLOWS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "hexatag/codec.h"
#include "hexatag/treebank.h"

namespace hexatag {

// Depth cap used by the command-line tools unless overridden.
inline constexpr int kDefaultDepthCap = 32;

struct Reject {
  size_t sentence = 0;  // 1-based
  std::string reason;
};

struct EncodedCorpus {
  std::vector<std::string> lines;  // one per encoded sentence, input order
  std::vector<Reject> rejects;
};

EncodedCorpus EncodeCorpus(const Corpus &corpus, BinarizationOrder order, bool labeled,
                           int jobs = 1);

struct VerifySummary {
  size_t verified = 0;
  std::vector<Reject> rejects;     // non-projective inputs
  std::vector<Reject> mismatches;  // round-trip failures, with a CoNLL-U dump
};

// decode(encode(t)) == t on heads and labels for every projective sentence.
VerifySummary VerifyCorpus(const Corpus &corpus, BinarizationOrder order, int jobs = 1);

struct BenchRow {
  int length = 0;
  int sentences = 0;
  int runs = 0;
  double mean_seconds_per_sentence = 0.0;
  double sentences_per_second = 0.0;
  long peak_rss_kb = 0;
};

// Times ViterbiDecode + TagsToBht + BhtToDep on `batch` random labeled score
// tables per control length; score generation is not timed.
std::vector<BenchRow> RunBench(const std::vector<int> &lengths, int batch, int runs,
                               uint64_t seed, int max_depth);
std::string BenchJson(const std::vector<BenchRow> &rows, int max_depth);

// Peak resident set size of this process in KiB, or 0 if unavailable.
long PeakRssKb();

}  // namespace hexatag

#endif  // HEXATAG_WORKFLOWS_H_
