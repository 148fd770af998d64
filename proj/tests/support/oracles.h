#ifndef HEXATAG_TESTS_SUPPORT_ORACLES_H_
#define HEXATAG_TESTS_SUPPORT_ORACLES_H_

// Reference implementations written independently of the library code they
// check. They favour obviousness over speed.

#include <cstdint>
#include <string>
#include <vector>

#include "hexatag/decoder.h"

namespace hexatag::testing {

// Every head vector in {0..n}^n that forms a single-rooted tree with no two
// crossing arcs (the arc from the virtual root at position 0 included),
// in lexicographic order.
std::vector<std::vector<int>> BruteForceProjectiveHeads(int n);

// Closed form for the number of projective single-rooted trees on n words:
// C(3n-2, n-1) / n.
int64_t ProjectiveTreeCount(int n);

// True when some pair of arcs (h1,d1), (h2,d2) strictly interleaves.
bool HasCrossingArcs(const std::vector<int> &heads);

// Stack simulation of the left-corner transition system over tag kinds
// written as "tl", "tr", "LL", "LR", "RL", "RR" (labels stripped).
bool OracleIsValid(const std::vector<std::string> &kinds);

struct OracleResult {
  std::vector<int> tag_ids;  // vocabulary ids
  double score = 0.0;
};

// Exhaustive search in lexicographic id order; the first strict maximum
// wins, so ties resolve to the smallest id sequence.
OracleResult OracleDecode(const ScoreTable &scores);

}  // namespace hexatag::testing

#endif  // HEXATAG_TESTS_SUPPORT_ORACLES_H_
