// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.
//
// Usage: acceptance --fixtures <dir> [--cli <path>]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catagg/catgnn.hpp"
#include "catagg/efficient.hpp"
#include "catagg/homcount.hpp"
#include "catagg/rng.hpp"
#include "catagg/walk.hpp"

using namespace catagg;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Failure {
    std::string detail;
};

#define REQUIRE_OR_FAIL(cond, msg)                    \
    do {                                              \
        if (!(cond)) throw Failure{msg};              \
    } while (0)

// Exact rational rank tracker, independent of the library's search
// internals: forward elimination over stored pivot columns.
struct ExactRank {
    std::vector<std::vector<Rational>> pivots;  // echelonized columns
    std::vector<std::size_t> pivot_pos;

    bool try_insert(std::vector<Rational> v) {
        for (std::size_t k = 0; k < pivots.size(); ++k) {
            const Rational& lead = v[pivot_pos[k]];
            if (lead != 0) {
                Rational f = lead / pivots[k][pivot_pos[k]];
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= f * pivots[k][i];
            }
        }
        std::size_t p = v.size();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != 0) { p = i; break; }
        if (p == v.size()) return false;
        pivots.push_back(std::move(v));
        pivot_pos.push_back(p);
        return true;
    }
};

int end_vertex(const Word& w) { return std::stoi(w.back()); }

// --- criterion 1: identity-coloring recovery ------------------------------

void criterion_identity_recovery() {
    auto t0 = Clock::now();
    Rng rng(101);
    for (int rep = 0; rep < 50; ++rep) {
        int n = rng.range(3, 12);
        Graph g = random_graph(n, 0.4, rng.next());
        ColorAssignment id = special_coloring(g, SpecialColoring::identity);
        LayeredBasis b = canonical_search(g, id, n);
        RationalMatrix a = adjacency_matrix(g);
        DenseMatrix atilde = augmented_normalized_adjacency(g);

        RationalMatrix c0i = efficient_matrix(b, 0, RationalMatrix::identity(n));
        for (std::size_t j = 0; j < c0i.cols(); ++j)
            REQUIRE_OR_FAIL(c0i.at(0, j) == Rational(1, n), "C_0^I entry != 1/n");

        for (int t = 1; t < b.last_nonempty_level(); ++t) {
            RationalMatrix ci = efficient_matrix(b, t, RationalMatrix::identity(n));
            RationalMatrix ca = efficient_matrix(b, t, a);
            DenseMatrix cf = efficient_matrix_float(b, t, atilde);
            for (std::size_t r = 0; r < ci.rows(); ++r)
                for (std::size_t c = 0; c < ci.cols(); ++c) {
                    int su = end_vertex(b.words[t][r]);
                    int tv = end_vertex(b.words[t + 1][c]);
                    REQUIRE_OR_FAIL(ci.at(r, c) == Rational(su == tv ? 1 : 0),
                                    "C_t^I is not the identity on end vertices");
                    REQUIRE_OR_FAIL(ca.at(r, c) == a.at(su, tv),
                                    "C_t^A does not recover A");
                    REQUIRE_OR_FAIL(std::abs(cf.at(r, c) - atilde.at(su, tv)) <= 1e-9,
                                    "float C_t^Ã deviates by more than 1e-9");
                }
        }
    }
    REQUIRE_OR_FAIL(seconds_since(t0) < 30.0, "identity recovery exceeded 30 s");
}

// --- criterion 2: trivial-coloring closed form -----------------------------

void criterion_trivial_closed_form() {
    Rng rng(101);  // same graph stream as criterion 1
    for (int rep = 0; rep < 50; ++rep) {
        int n = rng.range(3, 12);
        Graph g = random_graph(n, 0.4, rng.next());
        ColorAssignment triv = special_coloring(g, SpecialColoring::trivial);
        LayeredBasis b = canonical_search(g, triv, n);
        std::vector<BigInt> s = closed_walk_profile(g, 2 * n + 1);
        RationalMatrix a = adjacency_matrix(g);
        RationalMatrix id = RationalMatrix::identity(n);
        for (int t = 0; t < b.last_nonempty_level() && t < n; ++t) {
            REQUIRE_OR_FAIL(b.level_size(t) == 1, "trivial coloring |S_t| != 1");
            RationalMatrix ci = efficient_matrix(b, t, id);
            RationalMatrix ca = efficient_matrix(b, t, a);
            // Level t holds the walk column A^{t-1}·1, so the
            // single entries are ratios of consecutive closed-walk
            // sums: C_t^I = s(2t-1)/s(2t-2), C_t^A = s(2t)/s(2t-2)
            // for t >= 1, and (1, s(1)/s(0)) at t = 0.
            Rational want_ci = t == 0 ? Rational(1) : Rational(s[2 * t - 1]) / Rational(s[2 * t - 2]);
            Rational want_ca = t == 0 ? Rational(s[1]) / Rational(s[0])
                                      : Rational(s[2 * t]) / Rational(s[2 * t - 2]);
            REQUIRE_OR_FAIL(ci.at(0, 0) == want_ci, "C_t^I != closed-form ratio");
            REQUIRE_OR_FAIL(ca.at(0, 0) == want_ca, "C_t^A != closed-form ratio");
        }
    }
}

// --- criterion 3: canonical search vs exhaustive greedy --------------------

void criterion_search_vs_bruteforce() {
    Rng rng(103);
    int done = 0;
    while (done < 200) {
        int n = rng.range(3, 6);
        Graph g = random_graph(n, 0.5, rng.next());
        ColorAssignment c = tree_coloring(g, rng.range(0, 2));
        if (c.alphabet.size() > 3) continue;
        ++done;
        const int T = 4;
        LayeredBasis b = canonical_search(g, c, T);

        // Exhaustive reference: per level, scan *all* words of that
        // length in lexicographic order and keep the ones whose walk
        // column grows the exact rational rank.
        std::vector<Word> all_prev = {{}};
        for (int t = 1; t <= T; ++t) {
            std::vector<Word> all_cur;
            for (const Word& w : all_prev)
                for (const std::string& sym : c.alphabet) {
                    Word x = w;
                    x.push_back(sym);
                    all_cur.push_back(x);
                }
            ExactRank rank;
            std::vector<Word> expected;
            for (const Word& w : all_cur) {
                WalkColumn col = walk_column(g, c, w);
                std::vector<Rational> v(g.size());
                for (int u = 0; u < g.size(); ++u) v[u] = Rational(col.counts[u]);
                if (rank.try_insert(std::move(v))) expected.push_back(w);
            }
            std::vector<Word> got = t <= b.depth() ? b.words[t] : std::vector<Word>{};
            REQUIRE_OR_FAIL(got == expected, "S_t differs from exhaustive greedy");
            REQUIRE_OR_FAIL(expected.size() <= static_cast<std::size_t>(n), "|S_t| > n");
            // Prefix-closure over the previous level.
            std::set<Word> prev_set;
            if (t - 1 <= b.depth())
                for (const Word& w : b.words[t - 1]) prev_set.insert(w);
            for (const Word& w : got) {
                Word pre(w.begin(), w.end() - 1);
                REQUIRE_OR_FAIL(prev_set.count(pre) == 1, "S_t not prefix-closed");
            }
            all_prev = std::move(all_cur);
        }
    }
}

// --- criterion 4: automaton semantics equals column sums -------------------

void criterion_automaton_semantics() {
    Rng rng(104);
    for (int rep = 0; rep < 100; ++rep) {
        Graph g = random_graph(rng.range(3, 8), 0.45, rng.next());
        ColorAssignment c = tree_coloring(g, rep % 3);
        for (int t = 1; t <= 4; ++t)
            for (const auto& [w, cnt] : walk_refinement(g, c, t).multiset)
                REQUIRE_OR_FAIL(automaton_semantics(g, c, edge_symbol_word(w)) == cnt,
                                "automaton value != column sum");
    }
}

// --- criterion 5: caterpillar formula vs tree DP vs brute force ------------

void criterion_caterpillar_counts() {
    std::vector<CaterpillarShape> shapes;
    for (int spine = 1; spine <= 4; ++spine) {
        std::vector<int> legs(spine, 0);
        while (true) {
            shapes.push_back({spine, legs});
            int i = 0;
            while (i < spine && legs[i] == 2) legs[i++] = 0;
            if (i == spine) break;
            ++legs[i];
        }
    }
    Rng rng(105);
    for (int rep = 0; rep < 100; ++rep) {
        Graph g = random_graph(rng.range(3, 8), 0.45, rng.next());
        for (const CaterpillarShape& shape : shapes) {
            Graph pattern = build_caterpillar(shape);
            BigInt formula = hom_caterpillar_from_walks(shape, g);
            BigInt dp = hom_count_tree_dp(pattern, g);
            REQUIRE_OR_FAIL(formula == dp, "walk formula != tree DP");
            if (pattern.size() <= 6 && g.size() <= 6)
                REQUIRE_OR_FAIL(dp == hom_count_bruteforce(pattern, g),
                                "tree DP != brute force");
        }
    }
}

// --- criterion 6: isomorphism invariance of the serialized invariant -------

void criterion_invariance() {
    Rng rng(106);
    for (int rep = 0; rep < 100; ++rep) {
        int n = rng.range(3, 10);
        Graph g = random_graph(n, 0.45, rng.next());
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.range(0, i)]);
        Graph h = permute_graph(g, perm);
        for (int hh = 0; hh <= 2; ++hh) {
            std::string sg = serialize_stack(invariant_stack(g, tree_coloring(g, hh)));
            std::string sh = serialize_stack(invariant_stack(h, tree_coloring(h, hh)));
            REQUIRE_OR_FAIL(sg == sh, "serialized invariants differ under relabeling");
        }
    }
}

// --- criterion 7: committed separation fixture re-verifies ------------------

void criterion_separation_fixture(const std::string& fixtures) {
    auto slurp = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Failure{"missing fixture: " + path};
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto t0 = Clock::now();
    SeparationCertificate cert =
        certificate_from_json(slurp(fixtures + "/separation.cert.json"));
    Graph g1 = graph_from_json(slurp(fixtures + "/separation.g1.json"));
    Graph g2 = graph_from_json(slurp(fixtures + "/separation.g2.json"));
    REQUIRE_OR_FAIL(cert.g1 == g1 && cert.g2 == g2,
                    "fixture graphs disagree with the certificate");
    REQUIRE_OR_FAIL(g1.size() == 10 && g2.size() == 10, "fixture pair is not n = 10");
    REQUIRE_OR_FAIL(verify_separation(cert), "certificate fails re-verification");
    REQUIRE_OR_FAIL(cert.refinement_depth <= 4, "separation depth exceeds wr(4)");
    REQUIRE_OR_FAIL(seconds_since(t0) < 5.0, "re-verification exceeded 5 s");
}

// --- criterion 8: gradient check -------------------------------------------

void criterion_gradients() {
    Rng rng(108);
    std::vector<Graph> batch;
    for (int i = 0; i < 5; ++i) batch.push_back(random_graph(rng.range(5, 7), 0.5, rng.next()));
    for (int layers : {2, 5}) {
        for (CombineMode combine : {CombineMode::add, CombineMode::concat}) {
            for (LossKind loss : {LossKind::bce, LossKind::mse}) {
                ModelConfig cfg;
                cfg.layers = layers;
                cfg.width = 3;
                cfg.combine = combine;
                cfg.loss = loss;
                for (std::size_t gi = 0; gi < batch.size(); ++gi) {
                    const Graph& g = batch[gi];
                    ColorAssignment c = tree_coloring(g, 1);
                    Dataset one;
                    one.graphs = {g};
                    one.targets = {1.0};
                    Vocab vocab = build_vocab(one, {c}, cfg);
                    Params p = init_params(cfg, vocab, 300 + gi);
                    GraphLayers gl = precompute_layers(g, c, cfg, vocab);
                    double target = gi % 2 ? 1.0 : 0.0;
                    Params grad = p.like_zero();
                    backward(gl, cfg, p, target, grad);
                    auto check_slot = [&](DenseMatrix& slot, const DenseMatrix& gslot) {
                        const double h = 1e-6;
                        for (std::size_t i = 0; i < slot.rows(); ++i)
                            for (std::size_t j = 0; j < slot.cols(); ++j) {
                                double orig = slot.at(i, j);
                                slot.at(i, j) = orig + h;
                                double up = loss_value(forward(gl, cfg, p), target, loss);
                                slot.at(i, j) = orig - h;
                                double dn = loss_value(forward(gl, cfg, p), target, loss);
                                slot.at(i, j) = orig;
                                double num = (up - dn) / (2 * h);
                                double ana = gslot.at(i, j);
                                double denom = std::max({std::abs(num), std::abs(ana), 1e-8});
                                REQUIRE_OR_FAIL(std::abs(num - ana) / denom < 1e-4,
                                                "gradient relative error >= 1e-4");
                            }
                    };
                    for (std::size_t l = 0; l < p.w.size(); ++l) check_slot(p.w[l], grad.w[l]);
                    for (std::size_t l = 0; l < p.embed.size(); ++l)
                        check_slot(p.embed[l], grad.embed[l]);
                }
            }
        }
    }
}

// --- criterion 9: GCN equivalence -------------------------------------------

void criterion_gcn_equivalence() {
    Rng rng(109);
    const std::vector<std::string> feats = {"x", "y", "z"};
    int done = 0;
    while (done < 50) {
        int n = rng.range(4, 9);
        Graph base = random_graph(n, 0.5, rng.next());
        if (!base.connected()) continue;
        ++done;
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v : base.neighbors(u))
                if (u < v) edges.push_back({u, v});
        std::vector<std::string> f;
        for (int u = 0; u < n; ++u) f.push_back(feats[rng.range(0, 2)]);
        Graph g(n, edges, f);
        ColorAssignment c = combined_coloring(g, ColorAssignment::kSpecial);
        ModelConfig cfg;
        cfg.layers = 2 + done % 3;
        cfg.width = 4;
        cfg.combine = CombineMode::none;
        Dataset one;
        one.graphs = {g};
        one.targets = {1.0};
        Vocab vocab = build_vocab(one, {c}, cfg);
        Params p = init_params(cfg, vocab, 400 + done);
        double eff = forward(precompute_layers(g, c, cfg, vocab), cfg, p);
        double ref = gcn_reference_forward(g, cfg, p, vocab);
        REQUIRE_OR_FAIL(std::abs(eff - ref) <= 1e-9, "chain and GCN reference differ");
    }
}

// --- criterion 10: node-savings accounting ----------------------------------

void criterion_node_stats() {
    Rng rng(110);
    std::vector<Graph> corpus;
    for (int i = 0; i < 100; ++i) corpus.push_back(random_graph(rng.range(5, 12), 0.4, rng.next()));
    const int layers = 4;
    // Colorings ordered finest (identity) to coarsest (trivial = tree:0).
    std::vector<std::string> specs = {"identity", "tree:3", "tree:2", "tree:1", "tree:0"};
    double prev_avg = -1.0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        double total = 0.0;
        for (const Graph& g : corpus) {
            ColorAssignment c = coloring_from_spec(g, specs[k]);
            LayeredBasis b = canonical_search(g, c, layers);
            NodeStats st = node_stats(b, layers);
            total += static_cast<double>(st.total) / static_cast<double>(st.widths.size());
            if (specs[k] == "tree:0")
                for (std::size_t i = 0; i + 1 < st.widths.size(); ++i)
                    REQUIRE_OR_FAIL(st.widths[i] == 1, "trivial coloring hidden width != 1");
        }
        double avg = total / static_cast<double>(corpus.size());
        if (prev_avg >= 0.0)
            REQUIRE_OR_FAIL(avg <= prev_avg, "average width increased as h decreased");
        prev_avg = avg;
    }
}

// --- criterion 11: synthetic sum task ---------------------------------------

void criterion_sum_task() {
    Dataset ds = gen_sum_dataset(8, 2000, 1);
    std::vector<const Graph*> ptrs;
    for (const Graph& g : ds.graphs) ptrs.push_back(&g);

    std::vector<int> order(static_cast<int>(ds.graphs.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng shuffler(111);
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
        std::swap(order[i], order[shuffler.range(0, i)]);
    int cut = static_cast<int>(order.size() * 8 / 10);
    std::vector<int> train_idx(order.begin(), order.begin() + cut);
    std::vector<int> val_idx(order.begin() + cut, order.end());

    ModelConfig cfg;
    cfg.layers = 8;
    cfg.width = 8;
    cfg.combine = CombineMode::add;
    cfg.loss = LossKind::bce;
    cfg.lr = 0.01;
    cfg.batch_size = 32;
    cfg.seed = 1;

    auto run = [&](const std::string& spec, int epochs) {
        std::vector<ColorAssignment> cols;
        if (spec == "identity") {
            cols.reserve(ds.graphs.size());
            for (const Graph& g : ds.graphs)
                cols.push_back(combined_coloring(g, ColorAssignment::kSpecial));
        } else {
            cols = tree_coloring_joint(ptrs, std::stoi(spec.substr(5)));
        }
        ModelConfig c2 = cfg;
        c2.epochs = epochs;
        return train(ds, cols, train_idx, val_idx, c2).best_val_acc;
    };

    std::clock_t c0 = std::clock();
    double gate_acc = run("tree:1", 12);
    double gate_cpu = static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC;
    REQUIRE_OR_FAIL(gate_acc >= 0.70, "h = 1 validation accuracy below 0.70");
    REQUIRE_OR_FAIL(gate_cpu < 300.0, "h = 1 run exceeded 5 CPU-minutes");

    std::ofstream csv("sum_sweep.csv");
    csv << "coloring,best_val_acc\n";
    for (const std::string& spec : {"tree:0", "tree:1", "tree:2", "tree:3", "identity"}) {
        double acc = spec == "tree:1" ? gate_acc : run(spec, 4);
        csv << spec << "," << acc << "\n";
    }
    REQUIRE_OR_FAIL(csv.good(), "failed to write sum_sweep.csv");
}

// --- criterion 12: search wall-time scaling ---------------------------------

void criterion_search_scaling() {
    auto time_search = [](int n) {
        Graph g = random_graph(n, 0.3, 1200 + n);
        ColorAssignment deg = special_coloring(g, SpecialColoring::degree);
        double best = 1e18;
        for (int rep = 0; rep < 3; ++rep) {
            auto t0 = Clock::now();
            LayeredBasis b = canonical_search(g, deg, 5);
            best = std::min(best, seconds_since(t0) + 1e-6);
            REQUIRE_OR_FAIL(b.depth() >= 1, "search produced no levels");
        }
        return best;
    };
    double t20 = time_search(20);
    double t40 = time_search(40);
    double t80 = time_search(80);
    double e1 = std::log(t40 / t20) / std::log(2.0);
    double e2 = std::log(t80 / t40) / std::log(2.0);
    double exponent = std::max(e1, e2);
    if (exponent > 3.5)
        throw Failure{"scaling exponent " + std::to_string(exponent) + " > 3.5"};
}

}  // namespace

int main(int argc, char** argv) {
    std::string fixtures = "fixtures";
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--fixtures") fixtures = argv[i + 1];

    struct Criterion {
        const char* name;
        std::function<void()> fn;
    };
    std::vector<Criterion> criteria = {
        {"01 identity-coloring recovery", [] { criterion_identity_recovery(); }},
        {"02 trivial-coloring closed form", [] { criterion_trivial_closed_form(); }},
        {"03 search matches exhaustive greedy", [] { criterion_search_vs_bruteforce(); }},
        {"04 automaton semantics", [] { criterion_automaton_semantics(); }},
        {"05 caterpillar count equivalences", [] { criterion_caterpillar_counts(); }},
        {"06 invariant isomorphism invariance", [] { criterion_invariance(); }},
        {"07 separation fixture re-verifies", [&] { criterion_separation_fixture(fixtures); }},
        {"08 gradient check", [] { criterion_gradients(); }},
        {"09 GCN equivalence", [] { criterion_gcn_equivalence(); }},
        {"10 node-savings accounting", [] { criterion_node_stats(); }},
        {"11 synthetic sum task", [] { criterion_sum_task(); }},
        {"12 search scaling", [] { criterion_search_scaling(); }},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        auto t0 = Clock::now();
        try {
            c.fn();
            std::printf("PASS %s (%.1fs)\n", c.name, seconds_since(t0));
        } catch (const Failure& f) {
            std::printf("FAIL %s: %s\n", c.name, f.detail.c_str());
            ++failed;
        } catch (const std::exception& e) {
            std::printf("FAIL %s: unexpected error: %s\n", c.name, e.what());
            ++failed;
        }
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
