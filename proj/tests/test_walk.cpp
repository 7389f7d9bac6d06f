#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "catagg/rng.hpp"
#include "catagg/walk.hpp"

using namespace catagg;

namespace {

BigInt closed_sum(const Graph& g, int k) {
    // 1ᵀ Aᵏ 1 via repeated multiplication; oracle for wr totals.
    RationalMatrix a = adjacency_matrix(g);
    RationalMatrix m = RationalMatrix::identity(g.size());
    for (int i = 0; i < k; ++i) m = m * a;
    BigInt s = 0;
    for (int u = 0; u < g.size(); ++u)
        for (int v = 0; v < g.size(); ++v) s += BigInt(m.at(u, v).get_num());
    return s;
}

}  // namespace

TEST_CASE("word string round-trip") {
    CHECK(word_to_string({}) == "λ");
    CHECK(word_to_string({"1", "2", "1"}) == "1·2·1");
    CHECK(word_from_string("λ") == Word{});
    CHECK(word_from_string("") == Word{});
    CHECK(word_from_string("1·2·1") == Word{"1", "2", "1"});
}

TEST_CASE("empty word column is the all-ones vector") {
    Graph g = random_graph(6, 0.5, 11);
    WalkColumn col = walk_column(g, tree_coloring(g, 1), {});
    for (int u = 0; u < g.size(); ++u) CHECK(col.counts[u] == 1);
    CHECK(col.total() == g.size());
}

TEST_CASE("P3 with degree coloring: pinned length-2 columns") {
    Graph p3(3, {{0, 1}, {1, 2}});
    ColorAssignment deg = special_coloring(p3, SpecialColoring::degree);
    WalkColumn c12 = walk_column(p3, deg, {"1", "2"});
    CHECK(c12.counts == std::vector<BigInt>{0, 2, 0});
    WalkColumn c21 = walk_column(p3, deg, {"2", "1"});
    CHECK(c21.counts == std::vector<BigInt>{1, 0, 1});
    // Color mismatch at the final vertex kills the column.
    CHECK(walk_column(p3, deg, {"1", "1"}).total() == 0);
}

TEST_CASE("star with three colored leaves: pinned 4-symbol word count") {
    // Center vertex 2 ('b'), leaves 0,1 ('g') and 3 ('r').
    Graph g(4, {{0, 2}, {1, 2}, {2, 3}});
    ColorAssignment c;
    c.colors = {"g", "g", "b", "r"};
    c.alphabet = {"b", "g", "r"};
    WalkColumn col = walk_column(g, c, {"g", "b", "r", "b"});
    // Walks g→b→r→b: start at either g leaf, bounce center→r→center.
    CHECK(col.total() == 2);
    CHECK(col.counts == std::vector<BigInt>{0, 0, 2, 0});
}

TEST_CASE("K3 trivial coloring refinement") {
    Graph k3(3, {{0, 1}, {0, 2}, {1, 2}});
    ColorAssignment triv = special_coloring(k3, SpecialColoring::trivial);
    WalkRefinement wr = walk_refinement(k3, triv, 2);
    REQUIRE(wr.multiset.size() == 1);
    CHECK(wr.multiset.at(Word{"0", "0"}) == 6);
}

TEST_CASE("refinement totals equal closed-walk sums") {
    Rng rng(21);
    for (int rep = 0; rep < 8; ++rep) {
        Graph g = random_graph(rng.range(3, 8), 0.45, rng.next());
        ColorAssignment c = tree_coloring(g, rng.range(0, 2));
        for (int t = 1; t <= 4; ++t) {
            WalkRefinement wr = walk_refinement(g, c, t);
            BigInt total = 0;
            for (const auto& [w, cnt] : wr.multiset) {
                CHECK(static_cast<int>(w.size()) == t);
                CHECK(cnt > 0);
                total += cnt;
            }
            // A word of length t traverses t−1 edges.
            CHECK(total == closed_sum(g, t - 1));
        }
    }
}

TEST_CASE("columns match the exhaustive enumeration oracle") {
    Rng rng(22);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g = random_graph(rng.range(3, 7), 0.5, rng.next());
        ColorAssignment c = tree_coloring(g, 1);
        for (int t = 1; t <= 4; ++t) {
            WalkRefinement wr = walk_refinement(g, c, t);
            for (const auto& [w, cnt] : wr.multiset)
                CHECK(walk_column(g, c, w).total() == enumerate_walks_oracle(g, c, w));
        }
    }
}

TEST_CASE("automaton semantics") {
    Graph p3(3, {{0, 1}, {1, 2}});
    ColorAssignment deg = special_coloring(p3, SpecialColoring::degree);
    SUBCASE("empty word counts vertices") {
        CHECK(automaton_semantics(p3, deg, {}) == 3);
    }
    SUBCASE("single color symbol counts the class") {
        CHECK(automaton_semantics(p3, deg, {AutomatonSymbol::color("1")}) == 2);
    }
    SUBCASE("edge symbol between non-adjacent classes is zero") {
        CHECK(automaton_semantics(p3, deg, {AutomatonSymbol::edge("1", "1")}) == 0);
        CHECK(automaton_semantics(p3, deg, {AutomatonSymbol::edge("1", "2")}) == 2);
    }
    SUBCASE("edge-symbol form of a color word reproduces the column sum") {
        Rng rng(23);
        for (int rep = 0; rep < 8; ++rep) {
            Graph g = random_graph(rng.range(3, 8), 0.45, rng.next());
            ColorAssignment c = tree_coloring(g, 1);
            for (int t = 1; t <= 4; ++t)
                for (const auto& [w, cnt] : walk_refinement(g, c, t).multiset)
                    CHECK(automaton_semantics(g, c, edge_symbol_word(w)) == cnt);
        }
    }
}
