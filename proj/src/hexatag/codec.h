#ifndef HEXATAG_CODEC_H_
#define HEXATAG_CODEC_H_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hexatag/bht.h"
#include "hexatag/treebank.h"

namespace hexatag {

// The six hexatag types. For nonterminals the first letter is the node's
// direction relative to its parent and the second its head side, so kLR is a
// left child whose constituent head lies in its right subtree.
enum class TagKind {
  kTerminalLeft,
  kTerminalRight,
  kLL,
  kLR,
  kRL,
  kRR,
};

inline bool IsTerminal(TagKind kind) {
  return kind == TagKind::kTerminalLeft || kind == TagKind::kTerminalRight;
}

struct Hexatag {
  TagKind kind = TagKind::kTerminalLeft;
  std::string label;  // terminals in labeled mode only

  bool is_terminal() const { return IsTerminal(kind); }
  bool operator==(const Hexatag &) const = default;
};

// 2n-1 tags for n words: terminals at odd 1-based positions, nonterminals at
// even ones.
using TagSequence = std::vector<Hexatag>;

inline int WordCount(const TagSequence &tags) {
  return static_cast<int>(tags.size() + 1) / 2;
}

// Stack depth of the left-corner automaton before reading the tag at
// `position` (1-based).
struct ValidityState {
  int depth = 0;
  int position = 1;

  bool operator==(const ValidityState &) const = default;
};

// Change in stack depth caused by a tag kind, and the depth it needs.
int DepthDelta(TagKind kind);
int RequiredDepth(TagKind kind);

// max_depth <= 0 means unbounded. Throws kTransition on a parity mismatch, an
// underflowing stack, or a depth above max_depth.
ValidityState StepValidity(const ValidityState &state, const Hexatag &tag,
                           int max_depth = 0);

bool IsValidSequence(const TagSequence &tags, int max_depth = 0);

TagSequence BhtToTags(const Bht &bht, bool labeled);

// Runs the left-corner transition system. Throws kTransition for sequences
// that do not describe a BHT.
Bht TagsToBht(const TagSequence &tags);

std::string SerializeTag(const Hexatag &tag);
std::string SerializeTags(const TagSequence &tags);
// Throws kParse with a 1-based column for unknown tokens.
Hexatag ParseTag(std::string_view token);
TagSequence ParseTags(std::string_view line);

// Tree -> tags and back through the binary head tree.
TagSequence Encode(const DepTree &tree, BinarizationOrder order, bool labeled);
DepTree Decode(const TagSequence &tags, const std::vector<std::string> &forms = {},
               const std::string &placeholder_label = "dep");

// Tag inventory shared by score tables and the model. Ids are positions in
// the vocabulary file. Terminal score columns follow the order in which
// terminal tags appear; nonterminal columns likewise.
class TagVocab {
 public:
  static constexpr int kNonterminalCount = 4;

  // LL LR RL RR tl tr.
  static TagVocab Unlabeled();
  // LL LR RL RR, then tl/x tr/x for each label x in sorted order.
  static TagVocab FromLabels(std::vector<std::string> labels);
  static TagVocab FromCorpus(const Corpus &corpus, bool labeled);
  // One serialized tag per line. Throws kParse.
  static TagVocab Parse(std::string_view text);
  static TagVocab ReadFile(const std::string &path);

  std::string ToText() const;

  int size() const { return static_cast<int>(tags_.size()); }
  const Hexatag &tag(int id) const { return tags_[id]; }
  bool labeled() const { return labeled_; }

  int terminal_count() const { return static_cast<int>(terminal_ids_.size()); }
  int terminal_id(int column) const { return terminal_ids_[column]; }
  int nonterminal_id(int column) const { return nonterminal_ids_[column]; }

  // Score-table column for a tag, or nullopt if not in the vocabulary.
  std::optional<int> TerminalColumn(const Hexatag &tag) const;
  std::optional<int> NonterminalColumn(const Hexatag &tag) const;
  std::optional<int> Id(const Hexatag &tag) const;

 private:
  explicit TagVocab(std::vector<Hexatag> tags);

  std::vector<Hexatag> tags_;
  std::vector<int> terminal_ids_;
  std::vector<int> nonterminal_ids_;
  std::unordered_map<std::string, int> id_by_text_;
  std::vector<int> column_by_id_;
  bool labeled_ = false;
};

}  // namespace hexatag

#endif  // HEXATAG_CODEC_H_
