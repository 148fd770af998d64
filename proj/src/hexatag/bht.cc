#include "hexatag/bht.h"

#include <cctype>
#include <charconv>
#include <functional>
#include <utility>

#include "hexatag/error.h"

namespace hexatag {

int Bht::AddLeaf(int word, std::string deprel) {
  Node n;
  n.word = word;
  n.deprel = std::move(deprel);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Bht::AddInternal(HeadSide side, int left, int right) {
  Node n;
  n.side = side;
  n.left = left;
  n.right = right;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

std::vector<int> Bht::Leaves() const {
  std::vector<int> leaves;
  if (root_ == kNone) return leaves;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id < 0) continue;
    const Node &n = nodes_[id];
    if (n.is_leaf()) {
      leaves.push_back(id);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return leaves;
}

bool Bht::operator==(const Bht &other) const {
  if ((root_ == kNone) != (other.root_ == kNone)) return false;
  if (root_ == kNone) return true;
  std::vector<std::pair<int, int>> stack{{root_, other.root_}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    if (a < 0 || b < 0) {
      if (a != b) return false;
      continue;
    }
    const Node &x = nodes_[a];
    const Node &y = other.nodes_[b];
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf()) {
      if (x.word != y.word || x.deprel != y.deprel) return false;
      continue;
    }
    if (x.side != y.side) return false;
    stack.emplace_back(x.left, y.left);
    stack.emplace_back(x.right, y.right);
  }
  return true;
}

namespace {

// Copies the subtree rooted at `id` of `src` into `dst`; returns its new id.
int CopyInto(const Bht &src, int id, Bht *dst) {
  const Bht::Node &n = src.node(id);
  if (n.is_leaf()) return dst->AddLeaf(n.word, n.deprel);
  int left = CopyInto(src, n.left, dst);
  int right = CopyInto(src, n.right, dst);
  return dst->AddInternal(n.side, left, right);
}

}  // namespace

Bht MakeLeaf(int word, std::string deprel) {
  Bht bht;
  bht.set_root(bht.AddLeaf(word, std::move(deprel)));
  return bht;
}

Bht MakeNode(HeadSide side, const Bht &left, const Bht &right) {
  Bht bht;
  int l = CopyInto(left, left.root(), &bht);
  int r = CopyInto(right, right.root(), &bht);
  bht.set_root(bht.AddInternal(side, l, r));
  return bht;
}

void ValidateBht(const Bht &bht) {
  if (bht.empty()) Fail(ErrorCode::kStructure, "empty binary head tree");
  std::vector<int> stack{bht.root()};
  int expected = 1;
  // In-order leaf walk that also rejects open slots.
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id == Bht::kDummy) {
      Fail(ErrorCode::kStructure, "binary head tree has an unfilled slot");
    }
    if (id < 0 || static_cast<size_t>(id) >= bht.node_count()) {
      Fail(ErrorCode::kStructure, "binary head tree has a dangling child");
    }
    const Bht::Node &n = bht.node(id);
    if (n.is_leaf()) {
      if (n.word != expected) {
        Fail(ErrorCode::kStructure,
             "leaf " + std::to_string(n.word) + " found where word " +
                 std::to_string(expected) + " was expected");
      }
      ++expected;
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
}

std::string ToBracketed(const Bht &bht, const std::vector<std::string> &forms,
                        bool with_labels) {
  std::string out;
  std::function<void(int)> emit = [&](int id) {
    if (id == Bht::kDummy) {
      out += "_";
      return;
    }
    const Bht::Node &n = bht.node(id);
    if (n.is_leaf()) {
      if (static_cast<size_t>(n.word) <= forms.size()) {
        out += forms[n.word - 1];
      } else {
        out += std::to_string(n.word);
      }
      if (with_labels && !n.deprel.empty()) {
        out += '/';
        out += n.deprel;
      }
      return;
    }
    out += n.side == HeadSide::kLeft ? "(L " : "(R ";
    emit(n.left);
    out += ' ';
    emit(n.right);
    out += ')';
  };
  if (!bht.empty()) emit(bht.root());
  return out;
}

Bht ParseBracketed(std::string_view text) {
  Bht bht;
  size_t pos = 0;
  auto skip_ws = [&]() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  };
  auto fail = [&](const std::string &msg) -> int {
    Fail(ErrorCode::kParse,
         "bracketed tree, offset " + std::to_string(pos) + ": " + msg);
  };
  std::function<int()> parse = [&]() -> int {
    skip_ws();
    if (pos >= text.size()) return fail("unexpected end of input");
    if (text[pos] == '(') {
      ++pos;
      skip_ws();
      if (pos >= text.size() || (text[pos] != 'L' && text[pos] != 'R')) {
        return fail("expected L or R");
      }
      HeadSide side = text[pos] == 'L' ? HeadSide::kLeft : HeadSide::kRight;
      ++pos;
      int left = parse();
      int right = parse();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') return fail("expected ')'");
      ++pos;
      return bht.AddInternal(side, left, right);
    }
    size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != ')' &&
           text[pos] != '(') {
      ++pos;
    }
    std::string_view leaf = text.substr(start, pos - start);
    std::string_view number = leaf.substr(0, leaf.find('/'));
    int word = 0;
    auto [ptr, ec] =
        std::from_chars(number.data(), number.data() + number.size(), word);
    if (ec != std::errc() || ptr != number.data() + number.size() || word <= 0) {
      return fail("malformed leaf '" + std::string(leaf) + "'");
    }
    std::string deprel;
    if (number.size() < leaf.size()) deprel = std::string(leaf.substr(number.size() + 1));
    return bht.AddLeaf(word, std::move(deprel));
  };
  bht.set_root(parse());
  skip_ws();
  if (pos != text.size()) fail("trailing characters");
  return bht;
}

namespace {

class Binarizer {
 public:
  Binarizer(const DepTree &tree, BinarizationOrder order, Bht *out)
      : tree_(tree), order_(order), out_(out), children_(tree.size() + 1) {
    for (const Token &t : tree.tokens) children_[t.head].push_back(t.index);
  }

  // Builds the subtree headed by `head`: the head leaf absorbs its dependents
  // one at a time, nearest first on each side.
  int Build(int head) {
    int node = out_->AddLeaf(head, tree_.token(head).deprel);
    const auto &deps = children_[head];  // ascending word order
    auto attach_left = [&]() {
      for (auto it = deps.rbegin(); it != deps.rend(); ++it) {
        if (*it > head) continue;
        int sub = Build(*it);
        node = out_->AddInternal(HeadSide::kRight, sub, node);
      }
    };
    auto attach_right = [&]() {
      for (int d : deps) {
        if (d < head) continue;
        int sub = Build(d);
        node = out_->AddInternal(HeadSide::kLeft, node, sub);
      }
    };
    if (order_ == BinarizationOrder::kLeftFirst) {
      attach_left();
      attach_right();
    } else {
      attach_right();
      attach_left();
    }
    return node;
  }

  int Root() const { return children_[0].front(); }

 private:
  const DepTree &tree_;
  BinarizationOrder order_;
  Bht *out_;
  std::vector<std::vector<int>> children_;
};

}  // namespace

Bht DepToBht(const DepTree &tree, BinarizationOrder order) {
  if (auto crossing = FindCrossingArcs(tree)) {
    auto [a, b] = *crossing;
    Fail(ErrorCode::kNonProjective,
         "non-projective tree: arc " + std::to_string(a.first) + "->" +
             std::to_string(a.second) + " crosses arc " +
             std::to_string(b.first) + "->" + std::to_string(b.second));
  }
  Bht bht;
  Binarizer binarizer(tree, order, &bht);
  bht.set_root(binarizer.Build(binarizer.Root()));
  return bht;
}

DepTree BhtToDep(const Bht &bht, int n, const std::vector<std::string> &forms,
                 const std::string &placeholder_label) {
  std::vector<int> leaves = bht.Leaves();
  if (static_cast<int>(leaves.size()) != n) {
    Fail(ErrorCode::kStructure, "binary head tree has " +
                                    std::to_string(leaves.size()) +
                                    " leaves, expected " + std::to_string(n));
  }
  ValidateBht(bht);

  DepTree tree;
  tree.tokens.resize(n);
  for (int i = 0; i < n; ++i) {
    Token &t = tree.tokens[i];
    t.index = i + 1;
    t.form = static_cast<size_t>(i) < forms.size() ? forms[i]
                                                   : "w" + std::to_string(i + 1);
    t.upos = "_";
  }
  for (int id : leaves) {
    const Bht::Node &leaf = bht.node(id);
    tree.tokens[leaf.word - 1].deprel =
        leaf.deprel.empty() ? placeholder_label : leaf.deprel;
  }

  // Post-order: head_of[node] is the lexical head of the node's constituent.
  std::vector<int> head_of(bht.node_count(), 0);
  std::vector<std::pair<int, bool>> stack{{bht.root(), false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const Bht::Node &node = bht.node(id);
    if (node.is_leaf()) {
      head_of[id] = node.word;
      continue;
    }
    if (!expanded) {
      stack.emplace_back(id, true);
      stack.emplace_back(node.right, false);
      stack.emplace_back(node.left, false);
      continue;
    }
    int left = head_of[node.left];
    int right = head_of[node.right];
    if (node.side == HeadSide::kLeft) {
      tree.tokens[right - 1].head = left;
      head_of[id] = left;
    } else {
      tree.tokens[left - 1].head = right;
      head_of[id] = right;
    }
  }
  Token &root = tree.tokens[head_of[bht.root()] - 1];
  root.head = 0;
  root.deprel = std::string(kRootLabel);
  return tree;
}

}  // namespace hexatag
