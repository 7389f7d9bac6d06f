#pragma once

#include <map>
#include <string>
#include <vector>

#include "catagg/coloring.hpp"
#include "catagg/graph.hpp"

namespace catagg {

/// A colored-walk word: sequence of color strings, empty = λ.
using Word = std::vector<std::string>;

std::string word_to_string(const Word& w);  // symbols joined by "·"
Word word_from_string(const std::string& s);

/// One column of the walk-incidence matrix W_t: per-vertex exact counts
/// of occurrences of `word` ending at that vertex.
struct WalkColumn {
    Word word;
    std::vector<BigInt> counts;

    BigInt total() const;
};

/// Multiset wr(t): total occurrence count per realized word of length t.
struct WalkRefinement {
    int t = 0;
    std::map<Word, BigInt> multiset;

    bool operator==(const WalkRefinement& o) const { return t == o.t && multiset == o.multiset; }
};

/// Column of W_t for a single word via the P_a·A recurrence; exact.
WalkColumn walk_column(const Graph& g, const ColorAssignment& c, const Word& word);
std::vector<WalkColumn> walk_columns(const Graph& g, const ColorAssignment& c,
                                     const std::vector<Word>& words);

/// All words of length t with nonzero column sums, found by forward
/// expansion from λ (never enumerates Σ^t).
WalkRefinement walk_refinement(const Graph& g, const ColorAssignment& c, int t);

/// Exhaustive enumeration of all vertex sequences realizing `word`.
/// Guarded: |word| <= 8 and n <= 12. Independent of walk_column.
BigInt enumerate_walks_oracle(const Graph& g, const ColorAssignment& c, const Word& word);

/// Symbol of the graph-induced weighted automaton: a vertex color `a`
/// (transition P_a) or an edge symbol `a—b` (transition P_a·A·P_b).
struct AutomatonSymbol {
    std::string a;
    std::string b;       // empty for a plain color symbol
    bool is_edge = false;

    static AutomatonSymbol color(std::string c) { return {std::move(c), {}, false}; }
    static AutomatonSymbol edge(std::string x, std::string y) {
        return {std::move(x), std::move(y), true};
    }
};

/// ⟦𝒜(G,χ)⟧(w) = 𝟙ᵀ M(w₁)···M(w_t) 𝟙, exact.
BigInt automaton_semantics(const Graph& g, const ColorAssignment& c,
                           const std::vector<AutomatonSymbol>& word);

/// Simplified edge-symbol form of a color word: (w1—w2)(w2—w3)…; a single
/// color symbol for t = 1, the empty word for t = 0.
std::vector<AutomatonSymbol> edge_symbol_word(const Word& colors);

}  // namespace catagg
