#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catagg/walk.hpp"

namespace catagg {

/// Per-level canonical word sets S_t and the columns of the reduced
/// walk-incidence matrices B_t (exact integers). S_0 = {λ}; each S_{t+1}
/// is prefix-closed over S_t, linearly independent, and lexicographically
/// minimal in the coloring's alphabet order.
struct LayeredBasis {
    int n = 0;  // vertex count
    std::vector<std::vector<Word>> words;                    // words[t] = S_t
    std::vector<std::vector<std::vector<BigInt>>> columns;   // columns[t][k] = B_t column k

    int depth() const { return static_cast<int>(words.size()) - 1; }
    std::size_t level_size(int t) const { return words[t].size(); }

    /// Last level t with S_t nonempty (0 when only λ survives).
    int last_nonempty_level() const;
};

/// Layered canonical word search; O(T·n³·|Σ|) with unit-cost arithmetic.
LayeredBasis canonical_search(const Graph& g, const ColorAssignment& c, int T);

RationalMatrix basis_matrix(const LayeredBasis& basis, int t);       // B_t, V×S_t
RationalMatrix basis_left_inverse(const LayeredBasis& basis, int t); // B_t⁺ = (B_tᵀB_t)⁻¹B_tᵀ

/// C_t^M = B_t⁺ M B_{t+1}, exact. M must be n×n.
RationalMatrix efficient_matrix(const LayeredBasis& basis, int t, const RationalMatrix& m);

/// Float variant for learning: exact B_t⁺ converted to float64, then
/// multiplied with the float M and B_{t+1}.
DenseMatrix efficient_matrix_float(const LayeredBasis& basis, int t, const DenseMatrix& m);

/// The graph invariant: pairs (C_t^A, C_t^I) for 0 <= t < n, words in
/// canonical order. Serialization is byte-comparable across graphs that
/// share a canonical coloring.
struct EfficientStack {
    struct Level {
        std::vector<Word> source_words;  // S_t
        std::vector<Word> target_words;  // S_{t+1}
        RationalMatrix ca;               // C_t^A
        RationalMatrix ci;               // C_t^I
    };
    int n = 0;
    std::vector<Level> levels;
    std::vector<std::size_t> node_counts;  // |S_t| for t = 0..n

    bool operator==(const EfficientStack& o) const;
};

/// depth < 0 selects the full invariant (T = n).
EfficientStack invariant_stack(const Graph& g, const ColorAssignment& c, int depth = -1);
std::string serialize_stack(const EfficientStack& s);  // canonical JSON text
EfficientStack deserialize_stack(const std::string& text);

/// Ã = D̂^{-1/2} (A + 2I) D̂^{-1/2} with D̂ = D + 2I.
DenseMatrix augmented_normalized_adjacency(const Graph& g);

/// Computation-graph width accounting for an L-layer network over the
/// basis: hidden layer ℓ has width |S_{L-ℓ}|; message-passing baseline is
/// n per layer plus a single readout node.
struct NodeStats {
    std::vector<std::size_t> widths;  // |S_L|, |S_{L-1}|, ..., |S_0|
    std::size_t total = 0;
    double percent_saved = 0.0;  // 1 - total / (n·L + 1)
};

NodeStats node_stats(const LayeredBasis& basis, int layers);

}  // namespace catagg
