#include "hexatag/decoder.h"

#include <array>
#include <cmath>
#include <limits>

#include "hexatag/error.h"
#include "json.hpp"

namespace hexatag {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// The best-scoring tag among those sharing one depth transition at a
// position. Tags in a group differ only in their label, so the group's
// best entry is all the lattice needs.
struct Move {
  int delta = 0;
  int required = 0;
  double score = kNegInf;
  int id = -1;
};

void Offer(Move *move, double score, int id) {
  if (move->id < 0 || score > move->score || (score == move->score && id < move->id)) {
    move->score = score;
    move->id = id;
  }
}

// The two depth-transition groups available at a 1-based position.
std::array<Move, 2> MovesAt(const ScoreTable &scores, int position) {
  const TagVocab &vocab = *scores.vocab;
  std::array<Move, 2> moves;
  int row = (position - 1) / 2;
  if (position % 2 == 1) {
    moves[0].delta = DepthDelta(TagKind::kTerminalLeft);
    moves[0].required = RequiredDepth(TagKind::kTerminalLeft);
    moves[1].delta = DepthDelta(TagKind::kTerminalRight);
    moves[1].required = RequiredDepth(TagKind::kTerminalRight);
    auto values = scores.terminal.row(row);
    for (int c = 0; c < vocab.terminal_count(); ++c) {
      int id = vocab.terminal_id(c);
      bool left = vocab.tag(id).kind == TagKind::kTerminalLeft;
      Offer(&moves[left ? 0 : 1], values[c], id);
    }
  } else {
    moves[0].delta = DepthDelta(TagKind::kLL);
    moves[0].required = RequiredDepth(TagKind::kLL);
    moves[1].delta = DepthDelta(TagKind::kRL);
    moves[1].required = RequiredDepth(TagKind::kRL);
    auto values = scores.nonterminal.row(row);
    for (int c = 0; c < TagVocab::kNonterminalCount; ++c) {
      int id = vocab.nonterminal_id(c);
      TagKind kind = vocab.tag(id).kind;
      bool left_child = kind == TagKind::kLL || kind == TagKind::kLR;
      Offer(&moves[left_child ? 0 : 1], values[c], id);
    }
  }
  return moves;
}

}  // namespace

void ValidateScoreTable(const ScoreTable &scores) {
  auto fail = [](const std::string &msg) { Fail(ErrorCode::kInvalidArgument, msg); };
  if (!scores.vocab) fail("score table has no tag vocabulary");
  if (scores.n < 1) fail("score table needs at least one word");
  const int vt = scores.vocab->terminal_count();
  if (scores.terminal.rows != scores.n || scores.terminal.cols != vt) {
    fail("terminal scores: expected " + std::to_string(scores.n) + "x" +
         std::to_string(vt) + ", got " + std::to_string(scores.terminal.rows) + "x" +
         std::to_string(scores.terminal.cols));
  }
  if (scores.nonterminal.rows != scores.n - 1 ||
      (scores.n > 1 && scores.nonterminal.cols != TagVocab::kNonterminalCount)) {
    fail("nonterminal scores: expected " + std::to_string(scores.n - 1) + "x4, got " +
         std::to_string(scores.nonterminal.rows) + "x" +
         std::to_string(scores.nonterminal.cols));
  }
  for (double v : scores.terminal.data) {
    if (!std::isfinite(v)) fail("terminal scores contain a non-finite value");
  }
  for (double v : scores.nonterminal.data) {
    if (!std::isfinite(v)) fail("nonterminal scores contain a non-finite value");
  }
}

DecodeResult ViterbiDecode(const ScoreTable &scores, int max_depth) {
  ValidateScoreTable(scores);
  if (max_depth < 0) {
    Fail(ErrorCode::kInvalidArgument, "max depth must be >= 0 (0 means exact)");
  }
  const int n = scores.n;
  const int d = (max_depth == 0 || max_depth > n) ? n : max_depth;
  const int length = 2 * n - 1;
  const int width = d + 1;

  std::vector<std::array<Move, 2>> moves(length + 1);
  for (int p = 1; p <= length; ++p) moves[p] = MovesAt(scores, p);

  // best[p * width + k]: best score of tags p..length starting at depth k.
  std::vector<double> best(static_cast<size_t>(length + 2) * width, kNegInf);
  best[static_cast<size_t>(length + 1) * width + 1] = 0.0;
  for (int p = length; p >= 1; --p) {
    const double *next = &best[static_cast<size_t>(p + 1) * width];
    double *here = &best[static_cast<size_t>(p) * width];
    for (const Move &m : moves[p]) {
      if (m.id < 0) continue;
      for (int k = m.required; k < width; ++k) {
        int to = k + m.delta;
        if (to > d) continue;
        double cand = m.score + next[to];
        if (cand > here[k]) here[k] = cand;
      }
    }
  }
  if (best[static_cast<size_t>(width)] == kNegInf) {
    Fail(ErrorCode::kDecode, "no valid tag sequence within maximum stack depth " +
                                 std::to_string(d) + "; use a larger cap");
  }

  DecodeResult result;
  result.tags.reserve(length);
  result.depth_profile.reserve(length);
  int depth = 0;
  for (int p = 1; p <= length; ++p) {
    const double target = best[static_cast<size_t>(p) * width + depth];
    const double *next = &best[static_cast<size_t>(p + 1) * width];
    const Move *chosen = nullptr;
    for (const Move &m : moves[p]) {
      if (m.id < 0 || depth < m.required || depth + m.delta > d) continue;
      if (m.score + next[depth + m.delta] != target) continue;
      if (chosen == nullptr || m.id < chosen->id) chosen = &m;
    }
    if (chosen == nullptr) Fail(ErrorCode::kInternal, "lattice backtrace failed");
    depth += chosen->delta;
    result.log_score += chosen->score;
    result.tags.push_back(scores.vocab->tag(chosen->id));
    result.depth_profile.push_back(depth);
  }
  return result;
}

DecodeResult BruteForceDecode(const ScoreTable &scores) {
  ValidateScoreTable(scores);
  const int n = scores.n;
  if (n > 6) {
    Fail(ErrorCode::kInvalidArgument,
         "brute-force decoding supports n <= 6, got " + std::to_string(n));
  }
  const TagVocab &vocab = *scores.vocab;
  const int length = 2 * n - 1;
  std::vector<int> radix(length);
  for (int i = 0; i < length; ++i) {
    radix[i] = i % 2 == 0 ? vocab.terminal_count() : TagVocab::kNonterminalCount;
  }
  std::vector<int> column(length, 0);
  TagSequence tags(length);
  DecodeResult best;
  bool found = false;
  // Columns ascend with tag ids, so the odometer visits sequences in
  // lexicographic id order and a strict comparison keeps the first optimum.
  while (true) {
    for (int i = 0; i < length; ++i) {
      tags[i] = i % 2 == 0 ? vocab.tag(vocab.terminal_id(column[i]))
                           : vocab.tag(vocab.nonterminal_id(column[i]));
    }
    if (IsValidSequence(tags)) {
      double score = ScoreOf(tags, scores);
      if (!found || score > best.log_score) {
        best.tags = tags;
        best.log_score = score;
        found = true;
      }
    }
    int i = length - 1;
    while (i >= 0 && ++column[i] == radix[i]) column[i--] = 0;
    if (i < 0) break;
  }
  if (!found) Fail(ErrorCode::kDecode, "no valid tag sequence");
  ValidityState state;
  for (const Hexatag &tag : best.tags) {
    state = StepValidity(state, tag);
    best.depth_profile.push_back(state.depth);
  }
  return best;
}

double ScoreOf(const TagSequence &tags, const ScoreTable &scores) {
  if (static_cast<int>(tags.size()) != 2 * scores.n - 1) {
    Fail(ErrorCode::kInvalidArgument,
         "tag sequence of length " + std::to_string(tags.size()) +
             " does not fit a score table for " + std::to_string(scores.n) + " words");
  }
  double total = 0.0;
  for (size_t i = 0; i < tags.size(); ++i) {
    const Hexatag &tag = tags[i];
    const int row = static_cast<int>(i / 2);
    if (i % 2 == 0) {
      auto column = scores.vocab->TerminalColumn(tag);
      if (!column) {
        Fail(ErrorCode::kInvalidArgument,
             "tag '" + SerializeTag(tag) + "' is not a terminal in the vocabulary");
      }
      total += scores.terminal.at(row, *column);
    } else {
      auto column = scores.vocab->NonterminalColumn(tag);
      if (!column) {
        Fail(ErrorCode::kInvalidArgument,
             "tag '" + SerializeTag(tag) + "' is not a nonterminal in the vocabulary");
      }
      total += scores.nonterminal.at(row, *column);
    }
  }
  return total;
}

namespace {

Matrix MatrixFromJson(const nlohmann::json &rows, const char *field) {
  if (!rows.is_array()) {
    Fail(ErrorCode::kParse, std::string(field) + " must be an array of rows");
  }
  Matrix m;
  m.rows = static_cast<int>(rows.size());
  for (const auto &row : rows) {
    if (!row.is_array()) {
      Fail(ErrorCode::kParse, std::string(field) + " must be an array of rows");
    }
    if (m.data.empty() && m.cols == 0) m.cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != m.cols) {
      Fail(ErrorCode::kParse, std::string(field) + " has ragged rows");
    }
    for (const auto &v : row) {
      if (!v.is_number()) {
        Fail(ErrorCode::kParse, std::string(field) + " has a non-numeric entry");
      }
      m.data.push_back(v.get<double>());
    }
  }
  return m;
}

nlohmann::ordered_json MatrixToJson(const Matrix &m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < m.rows; ++r) {
    auto values = m.row(r);
    rows.push_back(std::vector<double>(values.begin(), values.end()));
  }
  return rows;
}

}  // namespace

std::vector<ScoredSentence> ParseScoreJsonl(std::string_view text,
                                            std::shared_ptr<const TagVocab> vocab) {
  std::vector<ScoredSentence> out;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) Fail(ErrorCode::kParse, "expected a JSON object");
      for (const char *key : {"tokens", "terminal_scores", "nonterminal_scores"}) {
        if (!obj.contains(key)) {
          Fail(ErrorCode::kParse, std::string("missing field '") + key + "'");
        }
      }
      ScoredSentence s;
      s.tokens = obj.at("tokens").get<std::vector<std::string>>();
      s.scores.n = static_cast<int>(s.tokens.size());
      s.scores.vocab = vocab;
      s.scores.terminal = MatrixFromJson(obj.at("terminal_scores"), "terminal_scores");
      s.scores.nonterminal =
          MatrixFromJson(obj.at("nonterminal_scores"), "nonterminal_scores");
      if (s.scores.nonterminal.rows == 0) s.scores.nonterminal.cols = 4;
      ValidateScoreTable(s.scores);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorCode::kParse, "score line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error &e) {
      Fail(e.code(), "score line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string ScoreJsonLine(const std::vector<std::string> &tokens,
                          const ScoreTable &scores) {
  nlohmann::ordered_json obj;
  obj["tokens"] = tokens;
  obj["terminal_scores"] = MatrixToJson(scores.terminal);
  obj["nonterminal_scores"] = MatrixToJson(scores.nonterminal);
  return obj.dump();
}

}  // namespace hexatag
