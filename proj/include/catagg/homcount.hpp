#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catagg/walk.hpp"

namespace catagg {

/// A caterpillar with unit-length legs: a spine path of `spine` vertices
/// where spine position i carries legs[i] pendant leaves.
struct CaterpillarShape {
    int spine = 0;
    std::vector<int> legs;  // size == spine, entries >= 0
};

/// Vertices 0..spine-1 form the spine path; pendant leaves follow in
/// spine order.
Graph build_caterpillar(const CaterpillarShape& shape);

/// hom(T, G) for a tree pattern T via the standard rooted DP: exact,
/// O(|T|·|E(G)|) per node. Throws if `tree` is not a tree.
BigInt hom_count_tree_dp(const Graph& tree, const Graph& host);

/// Exhaustive count of edge-preserving maps; guarded to patterns and
/// hosts with at most 6 vertices each.
BigInt hom_count_bruteforce(const Graph& pattern, const Graph& host);

/// Caterpillar hom counts from the degree-colored walk refinement only:
/// hom(C, G) = Σ_w wr(spine)(w) · Π_i deg(w_i)^legs[i].
BigInt hom_caterpillar_from_walks(const CaterpillarShape& shape, const Graph& host);

/// (𝟙ᵀ A^k 𝟙) for k = 0..len-1 (default len = n, which determines all
/// higher powers).
std::vector<BigInt> closed_walk_profile(const Graph& g, int len = -1);

/// Evidence that walk refinement under the degree coloring is strictly
/// finer than the closed-walk profile.
struct SeparationCertificate {
    Graph g1{0, {}};
    Graph g2{0, {}};
    std::vector<std::string> profile;          // shared closed-walk profile
    int refinement_depth = 0;                  // wr depth that separates
    CaterpillarShape witness;                  // caterpillar with differing hom counts
    std::string hom_g1;
    std::string hom_g2;
    std::uint64_t candidates_tried = 0;
};

/// Random search over degree-preserving 2-switches of random connected
/// 10-vertex hosts. Returns nullopt when the candidate budget runs out.
std::optional<SeparationCertificate> find_separating_pair(std::uint64_t budget,
                                                          std::uint64_t seed);

/// Re-checks every claim in a certificate from scratch.
bool verify_separation(const SeparationCertificate& cert);

std::string certificate_to_json(const SeparationCertificate& cert);
SeparationCertificate certificate_from_json(const std::string& text);

}  // namespace catagg
