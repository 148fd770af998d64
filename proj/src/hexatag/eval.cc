#include "hexatag/eval.h"

#include <cstdio>

#include "hexatag/error.h"
#include "json.hpp"

namespace hexatag {
namespace {

bool Excluded(const Token &gold, PunctPolicy policy) {
  switch (policy) {
    case PunctPolicy::kByUpos: return gold.upos == "PUNCT";
    case PunctPolicy::kByDeprel: return gold.deprel == "punct";
    case PunctPolicy::kNone: return false;
  }
  return false;
}

double Percent(int part, int whole) {
  return whole == 0 ? 100.0 : 100.0 * part / whole;
}

std::string OneDecimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

EvalReport AttachmentScores(const Corpus &gold, const Corpus &pred, PunctPolicy policy) {
  if (gold.sentences.size() != pred.sentences.size()) {
    Fail(ErrorCode::kAlignment, "gold has " + std::to_string(gold.sentences.size()) +
                                    " sentences, prediction has " +
                                    std::to_string(pred.sentences.size()));
  }
  EvalReport report;
  int correct_heads = 0;
  int correct_labeled = 0;
  for (size_t s = 0; s < gold.sentences.size(); ++s) {
    const DepTree &g = gold.sentences[s];
    const DepTree &p = pred.sentences[s];
    if (g.size() != p.size()) {
      Fail(ErrorCode::kAlignment, "sentence " + std::to_string(s + 1) + ": gold has " +
                                      std::to_string(g.size()) + " tokens, prediction has " +
                                      std::to_string(p.size()));
    }
    SentenceScore score;
    for (int i = 0; i < g.size(); ++i) {
      const Token &gt = g.tokens[i];
      const Token &pt = p.tokens[i];
      if (gt.form != pt.form) {
        Fail(ErrorCode::kAlignment, "sentence " + std::to_string(s + 1) + ", token " +
                                        std::to_string(i + 1) + ": gold form '" + gt.form +
                                        "' vs predicted '" + pt.form + "'");
      }
      if (Excluded(gt, policy)) {
        ++score.excluded;
        continue;
      }
      ++score.counted;
      if (gt.head == pt.head) {
        ++score.correct_heads;
        if (gt.deprel == pt.deprel) ++score.correct_labeled;
      }
    }
    report.counted_tokens += score.counted;
    report.excluded_tokens += score.excluded;
    correct_heads += score.correct_heads;
    correct_labeled += score.correct_labeled;
    report.sentences.push_back(score);
  }
  report.uas = Percent(correct_heads, report.counted_tokens);
  report.las = Percent(correct_labeled, report.counted_tokens);
  return report;
}

std::string EvalReport::ToText() const {
  return "UAS " + OneDecimal(uas) + "  LAS " + OneDecimal(las) + "  (counted " +
         std::to_string(counted_tokens) + ", excluded " + std::to_string(excluded_tokens) +
         ", sentences " + std::to_string(sentences.size()) + ")\n";
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json obj;
  obj["uas"] = std::stod(OneDecimal(uas));
  obj["las"] = std::stod(OneDecimal(las));
  obj["counted"] = counted_tokens;
  obj["excluded"] = excluded_tokens;
  return obj.dump();
}

}  // namespace hexatag
