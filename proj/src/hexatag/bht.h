#ifndef HEXATAG_BHT_H_
#define HEXATAG_BHT_H_

#include <string>
#include <string_view>
#include <vector>

#include "hexatag/treebank.h"

namespace hexatag {

// Which subtree of a binary head tree node holds the constituent's head.
enum class HeadSide { kLeft, kRight };

// Order in which a head's dependents are attached during binarization.
enum class BinarizationOrder { kLeftFirst, kRightFirst };

// Binary head tree stored as a node arena. Leaves carry a 1-based word index
// and the label of the arc attaching that word to its head; internal nodes
// carry a head side and two children. The child index kDummy marks an open
// slot, which only exists while a tree is being built from hexatags.
class Bht {
 public:
  static constexpr int kNone = -1;
  static constexpr int kDummy = -2;

  struct Node {
    int word = 0;  // > 0 iff leaf
    std::string deprel;
    HeadSide side = HeadSide::kLeft;
    int left = kNone;
    int right = kNone;

    bool is_leaf() const { return word > 0; }
  };

  Bht() = default;

  int AddLeaf(int word, std::string deprel);
  int AddInternal(HeadSide side, int left, int right);
  void set_right(int node, int child) { nodes_[node].right = child; }
  void set_root(int node) { root_ = node; }

  int root() const { return root_; }
  const Node &node(int id) const { return nodes_[id]; }
  size_t node_count() const { return nodes_.size(); }
  bool empty() const { return root_ == kNone; }

  // Leaves in left-to-right order.
  std::vector<int> Leaves() const;

  // Structural equality, independent of arena layout. Leaf labels compared.
  bool operator==(const Bht &other) const;

 private:
  std::vector<Node> nodes_;
  int root_ = kNone;
};

// Convenience builders for literal trees in tests and examples.
Bht MakeLeaf(int word, std::string deprel = "");
Bht MakeNode(HeadSide side, const Bht &left, const Bht &right);

// Checks span contiguity (leaves are 1..n in order) and absence of dummy
// slots. Throws kStructure.
void ValidateBht(const Bht &bht);

// Bracketed debug form, e.g. "(L (R A B) (R C D))". Leaves print as
// forms[word-1] when forms are given, otherwise as the word index; with
// labels, a leaf prints as "word/deprel".
std::string ToBracketed(const Bht &bht, const std::vector<std::string> &forms = {},
                        bool with_labels = false);

// Inverse of ToBracketed for numeric leaves ("3" or "3/nsubj").
Bht ParseBracketed(std::string_view text);

// Canonical binarization of a projective tree. Throws kNonProjective naming a
// crossing arc pair.
Bht DepToBht(const DepTree &tree,
             BinarizationOrder order = BinarizationOrder::kLeftFirst);

// Reads arcs off any well-formed BHT with n leaves. The word that ends up
// attached to the root is labeled kRootLabel; other leaves with an empty label
// get `placeholder_label`. Forms default to "w1".."wN".
DepTree BhtToDep(const Bht &bht, int n, const std::vector<std::string> &forms = {},
                 const std::string &placeholder_label = "dep");

}  // namespace hexatag

#endif  // HEXATAG_BHT_H_
