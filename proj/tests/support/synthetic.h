#ifndef HEXATAG_TESTS_SUPPORT_SYNTHETIC_H_
#define HEXATAG_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hexatag/decoder.h"
#include "hexatag/treebank.h"

namespace hexatag::testing {

// Deterministic English-like treebank with UPOS, punctuation and UD-style
// relations. Every tree is projective. Prepositional attachment is lexically
// conditioned ("of" attaches to nouns, most others to the verb, "with" goes
// either way) so a tagger has something to learn beyond word order.
Corpus SyntheticTreebank(int sentences, uint64_t seed);

// Uniformly shaped random projective tree over n words. With labels, each
// non-root token draws a label from the list.
DepTree RandomProjectiveTree(int n, std::mt19937_64 &rng,
                             const std::vector<std::string> &labels = {});

// Random single-rooted tree with no projectivity constraint.
DepTree RandomTree(int n, std::mt19937_64 &rng);

// Score table with N(0,1) entries.
ScoreTable RandomScoreTable(int n, std::shared_ptr<const TagVocab> vocab,
                            std::mt19937_64 &rng);

// Same shape, integer entries in [0, levels) so exact ties are common.
ScoreTable RandomTiedScoreTable(int n, std::shared_ptr<const TagVocab> vocab,
                                std::mt19937_64 &rng, int levels = 2);

}  // namespace hexatag::testing

#endif  // HEXATAG_TESTS_SUPPORT_SYNTHETIC_H_
