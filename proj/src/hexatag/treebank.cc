#include "hexatag/treebank.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hexatag/error.h"

namespace hexatag {
namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool ParseInt(std::string_view s, int *value) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

[[noreturn]] void ParseFail(size_t line_no, const std::string &message) {
  Fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + message);
}

// Children lists indexed by word (0 is the virtual root).
std::vector<std::vector<int>> Children(const DepTree &tree) {
  std::vector<std::vector<int>> children(tree.size() + 1);
  for (const Token &t : tree.tokens) children[t.head].push_back(t.index);
  return children;
}

}  // namespace

std::vector<int> DepTree::heads() const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const Token &t : tokens) out.push_back(t.head);
  return out;
}

std::vector<std::string> DepTree::deprels() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token &t : tokens) out.push_back(t.deprel);
  return out;
}

void ValidateTree(const DepTree &tree, std::string_view what) {
  const int n = tree.size();
  auto fail = [&](const std::string &msg) {
    Fail(ErrorCode::kStructure, std::string(what) + ": " + msg);
  };
  if (n == 0) fail("empty sentence");
  int root = 0;
  for (int i = 0; i < n; ++i) {
    const Token &t = tree.tokens[i];
    if (t.index != i + 1) {
      fail("token " + std::to_string(i + 1) + " has index " +
           std::to_string(t.index));
    }
    if (t.head < 0 || t.head > n) {
      fail("token " + std::to_string(t.index) + " has head " +
           std::to_string(t.head) + " outside [0, " + std::to_string(n) + "]");
    }
    if (t.head == t.index) {
      fail("token " + std::to_string(t.index) + " is its own head");
    }
    if (t.head == 0) {
      if (root != 0) {
        fail("multiple roots (tokens " + std::to_string(root) + " and " +
             std::to_string(t.index) + ")");
      }
      root = t.index;
      if (t.deprel != kRootLabel) {
        fail("root token " + std::to_string(t.index) + " has label '" +
             t.deprel + "', expected '" + std::string(kRootLabel) + "'");
      }
    }
  }
  if (root == 0) fail("no token attached to the root");
  // 0 = unvisited, 1 = on current path, 2 = known to reach the root.
  std::vector<char> state(n + 1, 0);
  state[0] = 2;
  std::vector<int> path;
  for (int start = 1; start <= n; ++start) {
    int w = start;
    path.clear();
    while (state[w] == 0) {
      state[w] = 1;
      path.push_back(w);
      w = tree.tokens[w - 1].head;
    }
    if (state[w] == 1) fail("cycle through token " + std::to_string(w));
    for (int p : path) state[p] = 2;
  }
}

DepTree MakeTree(const std::vector<int> &heads,
                 const std::vector<std::string> &deprels,
                 const std::vector<std::string> &forms) {
  DepTree tree;
  tree.tokens.reserve(heads.size());
  for (size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i) + 1;
    t.form = i < forms.size() ? forms[i] : "w" + std::to_string(i + 1);
    t.upos = "_";
    t.head = heads[i];
    if (i < deprels.size()) {
      t.deprel = deprels[i];
    } else {
      t.deprel = heads[i] == 0 ? std::string(kRootLabel) : "dep";
    }
    tree.tokens.push_back(std::move(t));
  }
  ValidateTree(tree, "tree");
  return tree;
}

Corpus ParseConllu(std::string_view text, std::string provenance) {
  Corpus corpus;
  corpus.provenance = std::move(provenance);

  DepTree current;
  std::string sent_id;
  size_t block_start = 0;
  size_t line_no = 0;

  auto flush = [&]() {
    if (current.tokens.empty()) {
      sent_id.clear();
      return;
    }
    std::string what = "sentence " + std::to_string(corpus.sentences.size() + 1);
    if (!sent_id.empty()) what += " (sent_id " + sent_id + ")";
    what += " at line " + std::to_string(block_start);
    ValidateTree(current, what);
    corpus.sentences.push_back(std::move(current));
    current = DepTree();
    sent_id.clear();
  };

  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (IsBlank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view kSentId = "# sent_id = ";
      if (line.substr(0, kSentId.size()) == kSentId) {
        sent_id = std::string(line.substr(kSentId.size()));
      }
      continue;
    }
    auto fields = SplitTabs(line);
    if (fields.size() != 10) {
      ParseFail(line_no, "expected 10 tab-separated columns, found " +
                             std::to_string(fields.size()));
    }
    std::string_view id = fields[0];
    // Multiword-token ranges and empty nodes.
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos) {
      continue;
    }
    if (current.tokens.empty()) block_start = line_no;
    Token token;
    if (!ParseInt(id, &token.index)) {
      ParseFail(line_no, "malformed ID '" + std::string(id) + "'");
    }
    if (token.index != current.size() + 1) {
      ParseFail(line_no, "expected token ID " +
                             std::to_string(current.size() + 1) + ", found " +
                             std::string(id));
    }
    if (!ParseInt(fields[6], &token.head)) {
      ParseFail(line_no, "malformed HEAD '" + std::string(fields[6]) + "'");
    }
    token.form = std::string(fields[1]);
    token.upos = std::string(fields[3]);
    token.deprel = std::string(fields[7]);
    current.tokens.push_back(std::move(token));
  }
  flush();
  return corpus;
}

std::string WriteConllu(const DepTree &tree) {
  std::string out;
  for (const Token &t : tree.tokens) {
    out += std::to_string(t.index);
    out += '\t';
    out += t.form;
    out += "\t_\t";
    out += t.upos;
    out += "\t_\t_\t";
    out += std::to_string(t.head);
    out += '\t';
    out += t.deprel;
    out += "\t_\t_\n";
  }
  out += '\n';
  return out;
}

std::string WriteConllu(const Corpus &corpus) {
  std::string out;
  for (const DepTree &tree : corpus.sentences) out += WriteConllu(tree);
  return out;
}

Corpus ReadConlluFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIo, "error reading " + path);
  return ParseConllu(buffer.str(), path);
}

bool IsProjective(const DepTree &tree) {
  // A tree is projective iff the yield of every subtree is contiguous.
  const int n = tree.size();
  auto children = Children(tree);
  std::vector<int> lo(n + 1), hi(n + 1), count(n + 1);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack(children[0].begin(), children[0].end());
  while (!stack.empty()) {
    int w = stack.back();
    stack.pop_back();
    order.push_back(w);
    for (int c : children[w]) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int w = *it;
    lo[w] = hi[w] = w;
    count[w] = 1;
    for (int c : children[w]) {
      lo[w] = std::min(lo[w], lo[c]);
      hi[w] = std::max(hi[w], hi[c]);
      count[w] += count[c];
    }
    if (hi[w] - lo[w] + 1 != count[w]) return false;
  }
  return true;
}

std::optional<std::pair<std::pair<int, int>, std::pair<int, int>>>
FindCrossingArcs(const DepTree &tree) {
  const auto &tokens = tree.tokens;
  for (size_t i = 0; i < tokens.size(); ++i) {
    int l1 = std::min(tokens[i].head, tokens[i].index);
    int r1 = std::max(tokens[i].head, tokens[i].index);
    for (size_t j = i + 1; j < tokens.size(); ++j) {
      int l2 = std::min(tokens[j].head, tokens[j].index);
      int r2 = std::max(tokens[j].head, tokens[j].index);
      if ((l1 < l2 && l2 < r1 && r1 < r2) || (l2 < l1 && l1 < r2 && r2 < r1)) {
        return std::make_pair(std::make_pair(tokens[i].head, tokens[i].index),
                              std::make_pair(tokens[j].head, tokens[j].index));
      }
    }
  }
  return std::nullopt;
}

std::vector<DepTree> EnumerateProjectiveTrees(
    int n, const std::vector<std::string> &labels) {
  if (n < 1 || n > 6) {
    Fail(ErrorCode::kInvalidArgument,
         "tree enumeration supports 1 <= n <= 6, got " + std::to_string(n));
  }
  std::vector<DepTree> out;
  std::vector<int> heads(n, 0);
  while (true) {
    bool self_loop = false;
    for (int i = 0; i < n; ++i) self_loop |= heads[i] == i + 1;
    if (!self_loop) {
      DepTree tree;
      bool ok = true;
      try {
        tree = MakeTree(heads);
      } catch (const Error &) {
        ok = false;
      }
      if (ok && IsProjective(tree)) {
        if (labels.empty()) {
          out.push_back(std::move(tree));
        } else {
          std::vector<int> slots;
          for (int i = 0; i < n; ++i) {
            if (heads[i] != 0) slots.push_back(i);
          }
          std::vector<size_t> choice(slots.size(), 0);
          while (true) {
            DepTree labeled = tree;
            for (size_t k = 0; k < slots.size(); ++k) {
              labeled.tokens[slots[k]].deprel = labels[choice[k]];
            }
            out.push_back(std::move(labeled));
            size_t k = slots.size();
            while (k > 0 && ++choice[k - 1] == labels.size()) choice[--k] = 0;
            if (k == 0) break;
          }
        }
      }
    }
    // Next head vector in lexicographic order.
    int i = n - 1;
    while (i >= 0 && ++heads[i] > n) heads[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

}  // namespace hexatag
