#ifndef HEXATAG_TREEBANK_H_
#define HEXATAG_TREEBANK_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hexatag {

// Label carried by the token attached to the virtual root.
inline constexpr std::string_view kRootLabel = "root";

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string upos;
  int head = 0;  // 0 is the virtual root
  std::string deprel;

  bool operator==(const Token &) const = default;
};

// A single-rooted dependency tree over tokens 1..N. Construction through
// parse_conllu or MakeTree validates the tree invariants; a DepTree built by
// hand can be checked with ValidateTree.
struct DepTree {
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  const Token &token(int index) const { return tokens[index - 1]; }
  std::vector<int> heads() const;
  std::vector<std::string> deprels() const;

  bool operator==(const DepTree &) const = default;
};

struct Corpus {
  std::vector<DepTree> sentences;
  std::string provenance;
};

// Builds a tree from a head vector (heads[i] is the head of word i+1).
// Forms default to "w1".."wN", upos to "_", deprels to "dep" (root gets
// kRootLabel). Throws kStructure if the vector is not a single-rooted tree.
DepTree MakeTree(const std::vector<int> &heads,
                 const std::vector<std::string> &deprels = {},
                 const std::vector<std::string> &forms = {});

// Throws kStructure naming `what` when an invariant is violated.
void ValidateTree(const DepTree &tree, std::string_view what = "sentence");

Corpus ParseConllu(std::string_view text, std::string provenance = "");
std::string WriteConllu(const Corpus &corpus);
std::string WriteConllu(const DepTree &tree);

Corpus ReadConlluFile(const std::string &path);

bool IsProjective(const DepTree &tree);

// For a non-projective tree, returns one pair of crossing arcs as
// ((head, dependent), (head, dependent)); head 0 is the virtual root.
std::optional<std::pair<std::pair<int, int>, std::pair<int, int>>>
FindCrossingArcs(const DepTree &tree);

// All projective single-rooted trees over n words, 1 <= n <= 6, in
// lexicographic order of head vectors. With labels, every non-root token
// ranges over the label set (root tokens always carry kRootLabel).
std::vector<DepTree> EnumerateProjectiveTrees(
    int n, const std::vector<std::string> &labels = {});

}  // namespace hexatag

#endif  // HEXATAG_TREEBANK_H_
