#include "hexatag/workflows.h"

#include <chrono>
#include <fstream>
#include <memory>
#include <random>

#include "hexatag/decoder.h"
#include "hexatag/error.h"
#include "hexatag/parallel.h"
#include "json.hpp"

namespace hexatag {
namespace {

bool SameArcs(const DepTree &a, const DepTree &b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (a.tokens[i].head != b.tokens[i].head || a.tokens[i].deprel != b.tokens[i].deprel) {
      return false;
    }
  }
  return true;
}

}  // namespace

EncodedCorpus EncodeCorpus(const Corpus &corpus, BinarizationOrder order, bool labeled,
                           int jobs) {
  const size_t count = corpus.sentences.size();
  std::vector<std::string> lines(count);
  std::vector<std::string> errors(count);
  ParallelFor(count, jobs, [&](size_t s) {
    try {
      lines[s] = SerializeTags(Encode(corpus.sentences[s], order, labeled));
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kNonProjective) throw;
      errors[s] = e.what();
    }
  });
  EncodedCorpus out;
  for (size_t s = 0; s < count; ++s) {
    if (errors[s].empty()) {
      out.lines.push_back(std::move(lines[s]));
    } else {
      out.rejects.push_back({s + 1, std::move(errors[s])});
    }
  }
  return out;
}

VerifySummary VerifyCorpus(const Corpus &corpus, BinarizationOrder order, int jobs) {
  const size_t count = corpus.sentences.size();
  // 0 verified, 1 rejected, 2 mismatch
  std::vector<int> status(count, 0);
  std::vector<std::string> detail(count);
  ParallelFor(count, jobs, [&](size_t s) {
    const DepTree &tree = corpus.sentences[s];
    if (!IsProjective(tree)) {
      status[s] = 1;
      auto crossing = FindCrossingArcs(tree);
      detail[s] = "non-projective: arc " + std::to_string(crossing->first.first) + "->" +
                  std::to_string(crossing->first.second) + " crosses arc " +
                  std::to_string(crossing->second.first) + "->" +
                  std::to_string(crossing->second.second);
      return;
    }
    std::string failure;
    try {
      DepTree back = Decode(Encode(tree, order, true));
      if (!SameArcs(tree, back)) failure = "decoded tree differs:\n" + WriteConllu(back);
    } catch (const Error &e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      status[s] = 2;
      detail[s] = "round trip failed for\n" + WriteConllu(tree) + failure;
    }
  });
  VerifySummary summary;
  for (size_t s = 0; s < count; ++s) {
    switch (status[s]) {
      case 0: ++summary.verified; break;
      case 1: summary.rejects.push_back({s + 1, std::move(detail[s])}); break;
      default: summary.mismatches.push_back({s + 1, std::move(detail[s])}); break;
    }
  }
  return summary;
}

long PeakRssKb() {
  std::ifstream status("/proc/self/status");
  std::string key;
  while (status >> key) {
    if (key == "VmHWM:") {
      long kb = 0;
      status >> kb;
      return kb;
    }
    status.ignore(4096, '\n');
  }
  return 0;
}

std::vector<BenchRow> RunBench(const std::vector<int> &lengths, int batch, int runs,
                               uint64_t seed, int max_depth) {
  if (batch < 1 || runs < 1) {
    Fail(ErrorCode::kInvalidArgument, "bench needs batch >= 1 and runs >= 1");
  }
  // A labeled inventory of realistic size (40 arc labels).
  std::vector<std::string> labels;
  for (int i = 0; i < 40; ++i) labels.push_back("l" + std::to_string(i));
  auto vocab = std::make_shared<const TagVocab>(TagVocab::FromLabels(labels));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<BenchRow> rows;
  for (int length : lengths) {
    if (length < 1) Fail(ErrorCode::kInvalidArgument, "bench lengths must be >= 1");
    std::vector<ScoreTable> tables(batch);
    for (ScoreTable &t : tables) {
      t.n = length;
      t.vocab = vocab;
      t.terminal = Matrix(length, vocab->terminal_count());
      t.nonterminal = Matrix(length - 1, TagVocab::kNonterminalCount);
      for (double &v : t.terminal.data) v = normal(rng);
      for (double &v : t.nonterminal.data) v = normal(rng);
    }
    size_t checksum = 0;
    auto start = std::chrono::steady_clock::now();
    for (int run = 0; run < runs; ++run) {
      for (const ScoreTable &t : tables) {
        DecodeResult best = ViterbiDecode(t, max_depth);
        DepTree tree = BhtToDep(TagsToBht(best.tags), length);
        checksum += static_cast<size_t>(tree.tokens.back().head);
      }
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // Keep the decoded trees observable so the loop is not optimized away.
    asm volatile("" : : "r"(checksum) : "memory");
    BenchRow row;
    row.length = length;
    row.sentences = batch;
    row.runs = runs;
    row.mean_seconds_per_sentence = seconds / (static_cast<double>(batch) * runs);
    row.sentences_per_second =
        row.mean_seconds_per_sentence > 0 ? 1.0 / row.mean_seconds_per_sentence : 0.0;
    row.peak_rss_kb = PeakRssKb();
    rows.push_back(row);
  }
  return rows;
}

std::string BenchJson(const std::vector<BenchRow> &rows, int max_depth) {
  nlohmann::ordered_json out;
  out["max_depth"] = max_depth;
  out["rows"] = nlohmann::ordered_json::array();
  for (const BenchRow &r : rows) {
    nlohmann::ordered_json row;
    row["length"] = r.length;
    row["sentences"] = r.sentences;
    row["runs"] = r.runs;
    row["mean_seconds_per_sentence"] = r.mean_seconds_per_sentence;
    row["sentences_per_second"] = r.sentences_per_second;
    row["peak_rss_kb"] = r.peak_rss_kb;
    out["rows"].push_back(row);
  }
  return out.dump();
}

}  // namespace hexatag
