#include "hexatag/codec.h"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <set>
#include <sstream>

#include "hexatag/error.h"

namespace hexatag {
namespace {

std::string KindName(TagKind kind) {
  switch (kind) {
    case TagKind::kTerminalLeft: return "tl";
    case TagKind::kTerminalRight: return "tr";
    case TagKind::kLL: return "LL";
    case TagKind::kLR: return "LR";
    case TagKind::kRL: return "RL";
    case TagKind::kRR: return "RR";
  }
  return "?";
}

TagKind NonterminalKind(bool right_child, HeadSide side) {
  if (right_child) return side == HeadSide::kLeft ? TagKind::kRL : TagKind::kRR;
  return side == HeadSide::kLeft ? TagKind::kLL : TagKind::kLR;
}

HeadSide SideOf(TagKind kind) {
  return kind == TagKind::kLL || kind == TagKind::kRL ? HeadSide::kLeft
                                                       : HeadSide::kRight;
}

[[noreturn]] void TransitionFail(int position, const std::string &message) {
  Fail(ErrorCode::kTransition,
       "position " + std::to_string(position) + ": " + message);
}

}  // namespace

int DepthDelta(TagKind kind) {
  switch (kind) {
    case TagKind::kTerminalLeft: return 1;
    case TagKind::kRL:
    case TagKind::kRR: return -1;
    default: return 0;
  }
}

int RequiredDepth(TagKind kind) {
  switch (kind) {
    case TagKind::kTerminalLeft: return 0;
    case TagKind::kRL:
    case TagKind::kRR: return 2;
    default: return 1;
  }
}

ValidityState StepValidity(const ValidityState &state, const Hexatag &tag,
                           int max_depth) {
  bool odd = state.position % 2 == 1;
  if (odd != tag.is_terminal()) {
    TransitionFail(state.position, std::string(odd ? "terminal" : "nonterminal") +
                                       " tag expected, found " + SerializeTag(tag));
  }
  int required = RequiredDepth(tag.kind);
  if (state.depth < required) {
    TransitionFail(state.position, SerializeTag(tag) + " requires stack depth >= " +
                                       std::to_string(required) + ", have " +
                                       std::to_string(state.depth));
  }
  int depth = state.depth + DepthDelta(tag.kind);
  if (max_depth > 0 && depth > max_depth) {
    TransitionFail(state.position, SerializeTag(tag) +
                                       " exceeds maximum stack depth " +
                                       std::to_string(max_depth));
  }
  return {depth, state.position + 1};
}

bool IsValidSequence(const TagSequence &tags, int max_depth) {
  if (tags.size() % 2 == 0) return false;
  ValidityState state;
  try {
    for (const Hexatag &tag : tags) state = StepValidity(state, tag, max_depth);
  } catch (const Error &) {
    return false;
  }
  return state.depth == 1;
}

TagSequence BhtToTags(const Bht &bht, bool labeled) {
  TagSequence tags;
  tags.reserve(bht.node_count());
  struct Frame {
    int id;
    bool right_child;
    bool expanded;
  };
  // The root node is tagged as a left child.
  std::vector<Frame> stack{{bht.root(), false, false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const Bht::Node &node = bht.node(f.id);
    if (node.is_leaf()) {
      Hexatag tag;
      tag.kind = f.right_child ? TagKind::kTerminalRight : TagKind::kTerminalLeft;
      if (labeled) tag.label = node.deprel;
      tags.push_back(std::move(tag));
    } else if (f.expanded) {
      tags.push_back({NonterminalKind(f.right_child, node.side), ""});
    } else {
      stack.push_back({node.right, true, false});
      stack.push_back({f.id, f.right_child, true});
      stack.push_back({node.left, false, false});
    }
  }
  return tags;
}

Bht TagsToBht(const TagSequence &tags) {
  if (tags.empty()) Fail(ErrorCode::kTransition, "empty tag sequence");
  if (tags.size() % 2 == 0) {
    Fail(ErrorCode::kTransition,
         "tag sequence has even length " + std::to_string(tags.size()));
  }
  Bht bht;
  // Each stack element is a partial subtree and the node whose right child
  // is still a dummy slot (Bht::kNone if the subtree is complete).
  struct Partial {
    int root;
    int open;
  };
  std::vector<Partial> stack;
  int next_word = 1;
  for (size_t i = 0; i < tags.size(); ++i) {
    const int position = static_cast<int>(i) + 1;
    const Hexatag &tag = tags[i];
    const bool odd = position % 2 == 1;
    if (odd != tag.is_terminal()) {
      TransitionFail(position, std::string(odd ? "terminal" : "nonterminal") +
                                   " tag expected, found " + SerializeTag(tag));
    }
#ifndef NDEBUG
    // Alternation: a terminal finds an open slot on top (unless the stack is
    // empty); a nonterminal finds a complete subtree on top.
    if (!stack.empty()) {
      assert(odd == (stack.back().open != Bht::kNone));
    }
#endif
    switch (tag.kind) {
      case TagKind::kTerminalLeft: {
        stack.push_back({bht.AddLeaf(next_word++, tag.label), Bht::kNone});
        break;
      }
      case TagKind::kTerminalRight: {
        if (stack.empty()) {
          TransitionFail(position, "tr requires stack depth >= 1, have 0");
        }
        Partial &top = stack.back();
        if (top.open == Bht::kNone) TransitionFail(position, "tr without an open slot");
        bht.set_right(top.open, bht.AddLeaf(next_word++, tag.label));
        top.open = Bht::kNone;
        break;
      }
      case TagKind::kLL:
      case TagKind::kLR: {
        if (stack.empty()) {
          TransitionFail(position, SerializeTag(tag) +
                                       " requires stack depth >= 1, have 0");
        }
        Partial &top = stack.back();
        int node = bht.AddInternal(SideOf(tag.kind), top.root, Bht::kDummy);
        top = {node, node};
        break;
      }
      case TagKind::kRL:
      case TagKind::kRR: {
        if (stack.size() < 2) {
          TransitionFail(position, SerializeTag(tag) +
                                       " requires stack depth >= 2, have " +
                                       std::to_string(stack.size()));
        }
        Partial done = stack.back();
        stack.pop_back();
        int node = bht.AddInternal(SideOf(tag.kind), done.root, Bht::kDummy);
        Partial &below = stack.back();
        if (below.open == Bht::kNone) {
          TransitionFail(position, SerializeTag(tag) + " without an open slot below");
        }
        bht.set_right(below.open, node);
        below.open = node;
        break;
      }
    }
  }
  if (stack.size() != 1) {
    Fail(ErrorCode::kTransition, "sequence ends with stack depth " +
                                     std::to_string(stack.size()) + ", expected 1");
  }
  if (stack.back().open != Bht::kNone) {
    Fail(ErrorCode::kTransition, "sequence ends with an unfilled slot");
  }
  bht.set_root(stack.back().root);
  return bht;
}

std::string SerializeTag(const Hexatag &tag) {
  std::string out = KindName(tag.kind);
  if (!tag.label.empty()) {
    out += '/';
    out += tag.label;
  }
  return out;
}

std::string SerializeTags(const TagSequence &tags) {
  std::string out;
  for (size_t i = 0; i < tags.size(); ++i) {
    if (i > 0) out += ' ';
    out += SerializeTag(tags[i]);
  }
  return out;
}

Hexatag ParseTag(std::string_view token) {
  std::string_view kind = token.substr(0, token.find('/'));
  Hexatag tag;
  if (kind == "tl") {
    tag.kind = TagKind::kTerminalLeft;
  } else if (kind == "tr") {
    tag.kind = TagKind::kTerminalRight;
  } else if (kind == "LL") {
    tag.kind = TagKind::kLL;
  } else if (kind == "LR") {
    tag.kind = TagKind::kLR;
  } else if (kind == "RL") {
    tag.kind = TagKind::kRL;
  } else if (kind == "RR") {
    tag.kind = TagKind::kRR;
  } else {
    Fail(ErrorCode::kParse, "unknown tag '" + std::string(token) + "'");
  }
  if (kind.size() < token.size()) {
    if (!tag.is_terminal()) {
      Fail(ErrorCode::kParse, "nonterminal tag '" + std::string(token) +
                                  "' cannot carry a label");
    }
    tag.label = std::string(token.substr(kind.size() + 1));
    if (tag.label.empty()) {
      Fail(ErrorCode::kParse, "empty label in tag '" + std::string(token) + "'");
    }
  }
  return tag;
}

TagSequence ParseTags(std::string_view line) {
  TagSequence tags;
  size_t pos = 0;
  while (pos < line.size()) {
    if (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r') {
      ++pos;
      continue;
    }
    size_t end = line.find_first_of(" \t\r", pos);
    if (end == std::string_view::npos) end = line.size();
    try {
      tags.push_back(ParseTag(line.substr(pos, end - pos)));
    } catch (const Error &e) {
      Fail(ErrorCode::kParse,
           "column " + std::to_string(pos + 1) + ": " + e.what());
    }
    pos = end;
  }
  return tags;
}

TagSequence Encode(const DepTree &tree, BinarizationOrder order, bool labeled) {
  return BhtToTags(DepToBht(tree, order), labeled);
}

DepTree Decode(const TagSequence &tags, const std::vector<std::string> &forms,
               const std::string &placeholder_label) {
  return BhtToDep(TagsToBht(tags), WordCount(tags), forms, placeholder_label);
}

TagVocab::TagVocab(std::vector<Hexatag> tags) : tags_(std::move(tags)) {
  column_by_id_.resize(tags_.size());
  bool has_left = false, has_right = false;
  int labeled_count = 0;
  for (int id = 0; id < static_cast<int>(tags_.size()); ++id) {
    const Hexatag &tag = tags_[id];
    std::string text = SerializeTag(tag);
    if (!id_by_text_.emplace(text, id).second) {
      Fail(ErrorCode::kParse, "duplicate tag '" + text + "' in vocabulary");
    }
    if (tag.is_terminal()) {
      column_by_id_[id] = static_cast<int>(terminal_ids_.size());
      terminal_ids_.push_back(id);
      has_left |= tag.kind == TagKind::kTerminalLeft;
      has_right |= tag.kind == TagKind::kTerminalRight;
      labeled_count += tag.label.empty() ? 0 : 1;
    } else {
      column_by_id_[id] = static_cast<int>(nonterminal_ids_.size());
      nonterminal_ids_.push_back(id);
    }
  }
  if (nonterminal_ids_.size() != kNonterminalCount) {
    Fail(ErrorCode::kParse, "vocabulary must list LL, LR, RL and RR exactly once");
  }
  if (!has_left || !has_right) {
    Fail(ErrorCode::kParse, "vocabulary needs both tl and tr terminal tags");
  }
  if (labeled_count != 0 && labeled_count != terminal_count()) {
    Fail(ErrorCode::kParse, "vocabulary mixes labeled and unlabeled terminals");
  }
  labeled_ = labeled_count > 0;
}

TagVocab TagVocab::Unlabeled() {
  return TagVocab({{TagKind::kLL, ""},
                   {TagKind::kLR, ""},
                   {TagKind::kRL, ""},
                   {TagKind::kRR, ""},
                   {TagKind::kTerminalLeft, ""},
                   {TagKind::kTerminalRight, ""}});
}

TagVocab TagVocab::FromLabels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<Hexatag> tags = {{TagKind::kLL, ""},
                               {TagKind::kLR, ""},
                               {TagKind::kRL, ""},
                               {TagKind::kRR, ""}};
  for (const std::string &label : labels) {
    if (label.empty()) Fail(ErrorCode::kInvalidArgument, "empty arc label");
    tags.push_back({TagKind::kTerminalLeft, label});
    tags.push_back({TagKind::kTerminalRight, label});
  }
  return TagVocab(std::move(tags));
}

TagVocab TagVocab::FromCorpus(const Corpus &corpus, bool labeled) {
  if (!labeled) return Unlabeled();
  std::set<std::string> labels{std::string(kRootLabel)};
  for (const DepTree &tree : corpus.sentences) {
    for (const Token &t : tree.tokens) labels.insert(t.deprel);
  }
  return FromLabels({labels.begin(), labels.end()});
}

TagVocab TagVocab::Parse(std::string_view text) {
  std::vector<Hexatag> tags;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      Fail(ErrorCode::kParse,
           "vocabulary line " + std::to_string(line_no) + ": empty line");
    }
    try {
      tags.push_back(ParseTag(line));
    } catch (const Error &e) {
      Fail(ErrorCode::kParse,
           "vocabulary line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return TagVocab(std::move(tags));
}

TagVocab TagVocab::ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

std::string TagVocab::ToText() const {
  std::string out;
  for (const Hexatag &tag : tags_) {
    out += SerializeTag(tag);
    out += '\n';
  }
  return out;
}

std::optional<int> TagVocab::Id(const Hexatag &tag) const {
  auto it = id_by_text_.find(SerializeTag(tag));
  if (it == id_by_text_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> TagVocab::TerminalColumn(const Hexatag &tag) const {
  auto id = Id(tag);
  if (!id || !tag.is_terminal()) return std::nullopt;
  return column_by_id_[*id];
}

std::optional<int> TagVocab::NonterminalColumn(const Hexatag &tag) const {
  auto id = Id(tag);
  if (!id || tag.is_terminal()) return std::nullopt;
  return column_by_id_[*id];
}

}  // namespace hexatag
