#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "catagg/coloring.hpp"
#include "catagg/rng.hpp"

using namespace catagg;

namespace {

// Partition of vertices induced by a coloring, as sorted class sets.
std::set<std::set<int>> classes(const ColorAssignment& c) {
    std::map<std::string, std::set<int>> by_color;
    for (std::size_t u = 0; u < c.colors.size(); ++u)
        by_color[c.colors[u]].insert(static_cast<int>(u));
    std::set<std::set<int>> out;
    for (auto& [_, cls] : by_color) out.insert(cls);
    return out;
}

// Reference refinement color: depth-h neighborhood unfolding, computed
// naively and independently of the string encoding.
struct Unfolding {
    int h;
    std::vector<Unfolding> nb;  // sorted
    bool operator<(const Unfolding& o) const { return key() < o.key(); }
    bool operator==(const Unfolding& o) const { return key() == o.key(); }
    std::string key() const {
        std::string s = "<";
        for (const auto& x : nb) s += x.key() + ";";
        return s + ">";
    }
};

Unfolding unfold(const Graph& g, int u, int h) {
    Unfolding out{h, {}};
    if (h == 0) return out;
    for (int v : g.neighbors(u)) out.nb.push_back(unfold(g, v, h - 1));
    std::sort(out.nb.begin(), out.nb.end());
    return out;
}

}  // namespace

TEST_CASE("height-0 refinement is constant") {
    Graph g = random_graph(7, 0.5, 1);
    ColorAssignment c = tree_coloring(g, 0);
    CHECK(c.alphabet.size() == 1);
}

TEST_CASE("P3 height-1 classes are {0,2} and {1}") {
    Graph p3(3, {{0, 1}, {1, 2}});
    ColorAssignment c = tree_coloring(p3, 1);
    CHECK(c.colors[0] == c.colors[2]);
    CHECK(c.colors[0] != c.colors[1]);
    CHECK(c.alphabet.size() == 2);
}

TEST_CASE("regular graphs stay monochromatic at every height") {
    Graph c6(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});
    Graph two_triangles(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    for (int h = 0; h <= 4; ++h) {
        CHECK(tree_coloring(c6, h).alphabet.size() == 1);
        CHECK(tree_coloring(two_triangles, h).alphabet.size() == 1);
    }
}

TEST_CASE("special colorings") {
    Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(special_coloring(g, SpecialColoring::trivial).alphabet ==
          std::vector<std::string>{"0"});
    CHECK(special_coloring(g, SpecialColoring::identity).alphabet.size() == 4);
    Graph k3(3, {{0, 1}, {0, 2}, {1, 2}});
    ColorAssignment deg = special_coloring(k3, SpecialColoring::degree);
    for (int u = 0; u < 3; ++u) CHECK(deg.colors[u] == "2");
}

TEST_CASE("degree coloring partitions like height-1 refinement") {
    Graph g = random_graph(9, 0.4, 17);
    CHECK(classes(special_coloring(g, SpecialColoring::degree)) ==
          classes(tree_coloring(g, 1)));
}

TEST_CASE("combined coloring") {
    SUBCASE("unattributed graph: same partition as the refinement") {
        Graph g = random_graph(8, 0.4, 5);
        for (int h = 0; h <= 2; ++h)
            CHECK(classes(combined_coloring(g, h)) == classes(tree_coloring(g, h)));
    }
    SUBCASE("h=0 with features: partition equals feature partition") {
        Graph g(4, {{0, 1}, {1, 2}, {2, 3}}, {"x", "y", "x", "z"});
        auto cls = classes(combined_coloring(g, 0));
        CHECK(cls == std::set<std::set<int>>{{0, 2}, {1}, {3}});
    }
    SUBCASE("identity-feature mode: singletons at any h") {
        Graph g(4, {{0, 1}, {1, 2}, {2, 3}}, {"x", "x", "x", "x"});
        ColorAssignment c = combined_coloring(g, ColorAssignment::kSpecial);
        CHECK(c.alphabet.size() == 4);
    }
}

TEST_CASE("partition matrices are orthogonal idempotent projections") {
    Graph g = random_graph(7, 0.5, 2);
    ColorAssignment c = tree_coloring(g, 2);
    RationalMatrix sum(g.size(), g.size());
    for (const auto& a : c.alphabet) {
        RationalMatrix p = partition_matrix(g, c, a);
        CHECK(p * p == p);
        sum = sum + p;
        for (const auto& b : c.alphabet)
            if (a != b) CHECK((p * partition_matrix(g, c, b)).is_zero());
    }
    CHECK(sum == RationalMatrix::identity(g.size()));
    CHECK_THROWS_AS(partition_matrix(g, c, "no-such-color"), std::invalid_argument);
}

TEST_CASE("refinement nesting: higher h never merges classes") {
    Rng rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g = random_graph(rng.range(4, 9), 0.4, rng.next());
        for (int h = 0; h <= 3; ++h) {
            ColorAssignment lo = tree_coloring(g, h);
            ColorAssignment hi = tree_coloring(g, h + 1);
            for (int u = 0; u < g.size(); ++u)
                for (int v = 0; v < g.size(); ++v)
                    if (hi.colors[u] == hi.colors[v])
                        CHECK(lo.colors[u] == lo.colors[v]);
        }
    }
}

TEST_CASE("isomorphism invariance of refinement strings") {
    Rng rng(78);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g = random_graph(7, 0.4, rng.next());
        std::vector<int> perm = {6, 0, 3, 1, 5, 2, 4};
        Graph h = permute_graph(g, perm);
        for (int hh = 0; hh <= 3; ++hh) {
            ColorAssignment cg = tree_coloring(g, hh);
            ColorAssignment ch = tree_coloring(h, hh);
            for (int u = 0; u < g.size(); ++u) CHECK(cg.colors[u] == ch.colors[perm[u]]);
        }
    }
}

TEST_CASE("cross-graph comparability against the unfolding oracle") {
    Rng rng(79);
    for (int rep = 0; rep < 8; ++rep) {
        Graph a = random_graph(rng.range(3, 6), 0.5, rng.next());
        Graph b = random_graph(rng.range(3, 6), 0.5, rng.next());
        for (int h = 0; h <= 3; ++h) {
            auto joint = tree_coloring_joint({&a, &b}, h);
            for (int u = 0; u < a.size(); ++u)
                for (int v = 0; v < b.size(); ++v) {
                    bool same_string = joint[0].colors[u] == joint[1].colors[v];
                    bool same_unfolding = unfold(a, u, h) == unfold(b, v, h);
                    CHECK(same_string == same_unfolding);
                }
        }
    }
}

TEST_CASE("stabilized partitions stay stable") {
    Rng rng(80);
    for (int rep = 0; rep < 6; ++rep) {
        Graph g = random_graph(rng.range(4, 8), 0.4, rng.next());
        int prev = -1;
        bool stable_seen = false;
        for (int h = 0; h <= 6; ++h) {
            int k = static_cast<int>(classes(tree_coloring(g, h)).size());
            if (stable_seen) CHECK(k == prev);
            if (k == prev) stable_seen = true;
            prev = k;
        }
    }
}

TEST_CASE("coloring_from_spec parses the CLI syntax") {
    Graph g(3, {{0, 1}, {1, 2}});
    CHECK(coloring_from_spec(g, "trivial").alphabet.size() == 1);
    CHECK(coloring_from_spec(g, "identity").alphabet.size() == 3);
    CHECK(coloring_from_spec(g, "degree").alphabet ==
          std::vector<std::string>{"1", "2"});
    CHECK(coloring_from_spec(g, "tree:1").alphabet.size() == 2);
    CHECK(coloring_from_spec(g, "combined:identity").alphabet.size() == 3);
    CHECK_THROWS_AS(coloring_from_spec(g, "bogus"), std::invalid_argument);
}
