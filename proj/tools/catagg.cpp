// catagg: batch front end for the efficient-aggregation library.
// Subcommands: precompute, walks, verify, separate, gen-synth, train, stats.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "catagg/catgnn.hpp"
#include "catagg/efficient.hpp"
#include "catagg/homcount.hpp"
#include "catagg/rng.hpp"

namespace fs = std::filesystem;
using namespace catagg;

namespace {

constexpr const char* kVersion = "1.0.0";

// --- plumbing ---------------------------------------------------------

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write(const fs::path& p, const std::string& content) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

std::string digest(const std::string& data) {  // FNV-1a, 64-bit
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;
    std::vector<std::string> outputs;

    void add_input(const fs::path& p) {
        if (fs::is_regular_file(p)) input_digests[p.string()] = digest(read_file(p));
    }
    void write(const fs::path& primary_output) const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["arguments"] = arguments;
        j["seed"] = seed;
        j["version"] = kVersion;
        j["inputs"] = input_digests;
        j["outputs"] = outputs;
        fs::path p = primary_output;
        p += ".manifest.json";
        atomic_write(p, j.dump(2) + "\n");
    }
};

Graph load_single_graph(const fs::path& p) { return graph_from_json(read_file(p)); }

Dataset load_dataset(const fs::path& p) {
    return load_graph_collection(
        p, fs::is_directory(p) ? GraphFormat::tudataset : GraphFormat::json);
}

std::string format_double(double x) {
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

// --- verify suites -----------------------------------------------------

bool suite_identity(std::uint64_t seed) {
    Rng rng(seed);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g;
        do {
            g = random_graph(rng.range(3, 8), 0.5, rng.next());
        } while (!g.connected());
        ColorAssignment c = special_coloring(g, SpecialColoring::identity);
        EfficientStack st = invariant_stack(g, c, 3);
        RationalMatrix adj = adjacency_matrix(g);
        for (std::size_t t = 1; t < st.levels.size(); ++t) {
            // C_t^I = I and C_t^A = A under the word↔vertex bijection
            // (a word's vertex is its last color).
            for (int u = 0; u < g.size(); ++u) {
                int su = std::stoi(st.levels[t].source_words[u].back());
                for (int v = 0; v < g.size(); ++v) {
                    int tv = std::stoi(st.levels[t].target_words[v].back());
                    if (st.levels[t].ci.at(u, v) != Rational(su == tv ? 1 : 0))
                        return false;
                    if (st.levels[t].ca.at(u, v) != adj.at(su, tv)) return false;
                }
            }
        }
        for (int u = 0; u < g.size(); ++u)
            if (st.levels[0].ci.at(0, u) != Rational(1, g.size())) return false;
    }
    return true;
}

bool suite_trivial(std::uint64_t seed) {
    Rng rng(seed);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g;
        do {
            g = random_graph(rng.range(3, 8), 0.5, rng.next());
        } while (!g.connected());
        ColorAssignment c = special_coloring(g, SpecialColoring::trivial);
        EfficientStack st = invariant_stack(g, c);
        std::vector<BigInt> s = closed_walk_profile(g, 2 * g.size());
        auto sk = [&](int k) { return Rational(s[k]); };
        for (int t = 0; t < g.size(); ++t) {
            if (st.levels[t].ci.rows() != 1 || st.levels[t].ci.cols() != 1) return false;
            Rational ci = t == 0 ? Rational(1) : sk(2 * t - 1) / sk(2 * t - 2);
            Rational ca = t == 0 ? sk(1) / sk(0) : sk(2 * t) / sk(2 * t - 2);
            if (st.levels[t].ci.at(0, 0) != ci || st.levels[t].ca.at(0, 0) != ca)
                return false;
        }
    }
    return true;
}

bool suite_automaton(std::uint64_t seed) {
    Rng rng(seed);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g = random_graph(rng.range(2, 8), 0.4, rng.next());
        ColorAssignment c = special_coloring(g, SpecialColoring::degree);
        for (int t = 0; t <= 3; ++t) {
            WalkRefinement wr = walk_refinement(g, c, t);
            for (const auto& [word, cnt] : wr.multiset)
                if (automaton_semantics(g, c, edge_symbol_word(word)) != cnt) return false;
        }
    }
    return true;
}

bool suite_invariance(std::uint64_t seed) {
    Rng rng(seed);
    for (int rep = 0; rep < 10; ++rep) {
        Graph g = random_graph(rng.range(3, 7), 0.4, rng.next());
        std::vector<int> perm(g.size());
        for (int i = 0; i < g.size(); ++i) perm[i] = i;
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);
        Graph h = permute_graph(g, perm);
        for (int hh = 0; hh <= 2; ++hh) {
            std::string a = serialize_stack(invariant_stack(g, tree_coloring(g, hh), 3));
            std::string b = serialize_stack(invariant_stack(h, tree_coloring(h, hh), 3));
            if (a != b) return false;
        }
    }
    return true;
}

bool suite_gradient(std::uint64_t seed) {
    Rng rng(seed);
    Graph g;
    do {
        g = random_graph(6, 0.5, rng.next());
    } while (!g.connected());
    ModelConfig cfg;
    cfg.layers = 3;
    cfg.width = 3;
    ColorAssignment c = combined_coloring(g, 1);
    Dataset d;
    d.graphs = {g};
    Vocab vocab = build_vocab(d, {c}, cfg);
    GraphLayers gl = precompute_layers(g, c, cfg, vocab);
    Params p = init_params(cfg, vocab, seed);
    Params grad = p.like_zero();
    backward(gl, cfg, p, 1.0, grad);
    const double h = 1e-6;
    auto check = [&](DenseMatrix& pm, const DenseMatrix& gm) {
        for (std::size_t i = 0; i < pm.data().size(); ++i) {
            double keep = pm.data()[i];
            pm.data()[i] = keep + h;
            double up = loss_value(forward(gl, cfg, p), 1.0, cfg.loss);
            pm.data()[i] = keep - h;
            double dn = loss_value(forward(gl, cfg, p), 1.0, cfg.loss);
            pm.data()[i] = keep;
            double fd = (up - dn) / (2 * h);
            if (std::abs(fd - gm.data()[i]) > 1e-4 * std::max(1.0, std::abs(fd)))
                return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < p.w.size(); ++i)
        if (!check(p.w[i], grad.w[i])) return false;
    for (std::size_t i = 0; i < p.embed.size(); ++i)
        if (!check(p.embed[i], grad.embed[i])) return false;
    return true;
}

// --- subcommand bodies -------------------------------------------------

int cmd_precompute(const fs::path& in, const std::string& coloring, int depth,
                   const fs::path& out, RunManifest& mf) {
    Graph g = load_single_graph(in);
    mf.add_input(in);
    ColorAssignment c = coloring_from_spec(g, coloring);
    EfficientStack st = invariant_stack(g, c, depth);
    atomic_write(out, serialize_stack(st) + "\n");
    mf.outputs.push_back(out.string());
    mf.write(out);
    return 0;
}

int cmd_walks(const fs::path& in, const std::string& coloring, int depth,
              const fs::path& out, RunManifest& mf) {
    Graph g = load_single_graph(in);
    mf.add_input(in);
    ColorAssignment c = coloring_from_spec(g, coloring);
    WalkRefinement wr = walk_refinement(g, c, depth);
    std::ostringstream csv;
    csv << "word,count\n";
    for (const auto& [word, cnt] : wr.multiset)
        csv << word_to_string(word) << "," << cnt.get_str() << "\n";
    atomic_write(out, csv.str());
    mf.outputs.push_back(out.string());
    mf.write(out);
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    std::vector<std::pair<std::string, bool (*)(std::uint64_t)>> suites = {
        {"identity", suite_identity}, {"trivial", suite_trivial},
        {"automaton", suite_automaton}, {"invariance", suite_invariance},
        {"gradient", suite_gradient},
    };
    bool all_ok = true;
    bool matched = false;
    for (const auto& [name, fn] : suites) {
        if (suite != "all" && suite != name) continue;
        matched = true;
        bool ok = fn(seed);
        all_ok = all_ok && ok;
        std::cout << name << "\t" << (ok ? "pass" : "FAIL") << "\n";
    }
    if (!matched) {
        std::cerr << "unknown suite: " << suite << "\n";
        return 1;
    }
    return all_ok ? 0 : 1;
}

int cmd_separate(int n, std::uint64_t budget, std::uint64_t seed, const fs::path& out,
                 RunManifest& mf) {
    if (n != 10) {
        std::cerr << "separate: only --n 10 is supported\n";
        return 1;
    }
    auto cert = find_separating_pair(budget, seed);
    if (!cert) {
        std::cerr << "separate: budget exhausted without a separating pair\n";
        return 1;
    }
    fs::path g1 = out, g2 = out, cf = out;
    g1 += ".g1.json";
    g2 += ".g2.json";
    cf += ".cert.json";
    atomic_write(g1, graph_to_json(cert->g1) + "\n");
    atomic_write(g2, graph_to_json(cert->g2) + "\n");
    atomic_write(cf, certificate_to_json(*cert) + "\n");
    mf.outputs = {g1.string(), g2.string(), cf.string()};
    mf.write(cf);
    std::cout << "found after " << cert->candidates_tried << " candidates\n";
    return 0;
}

int cmd_gen_synth(int bits, int count, std::uint64_t seed, const fs::path& out,
                  RunManifest& mf) {
    Dataset ds = gen_sum_dataset(bits, count, seed);
    atomic_write(out, dataset_to_json(ds) + "\n");
    mf.outputs.push_back(out.string());
    mf.write(out);
    return 0;
}

std::vector<ColorAssignment> dataset_colorings(const Dataset& ds, const std::string& spec,
                                               int jobs) {
    // Joint refinement keeps color strings byte-comparable across graphs.
    std::vector<const Graph*> ptrs;
    for (const auto& g : ds.graphs) ptrs.push_back(&g);
    if (spec.rfind("combined:", 0) == 0) {
        std::string arg = spec.substr(9);
        int h = arg == "identity" ? ColorAssignment::kSpecial : std::stoi(arg);
        return combined_coloring_joint(ptrs, h);
    }
    if (spec.rfind("tree:", 0) == 0)
        return tree_coloring_joint(ptrs, std::stoi(spec.substr(5)));
    std::vector<ColorAssignment> out(ds.graphs.size());
    parallel_for(ds.graphs.size(), jobs, [&](std::size_t i) {
        out[i] = coloring_from_spec(ds.graphs[i], spec);
    });
    return out;
}

int cmd_train(const fs::path& in, const std::string& coloring, ModelConfig cfg,
              int jobs, const fs::path& out, RunManifest& mf) {
    (void)jobs;
    Dataset ds = load_dataset(in);
    mf.add_input(in);
    auto colorings = dataset_colorings(ds, coloring, jobs);
    // Deterministic 80/20 split.
    std::vector<int> idx(ds.graphs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    Rng rng(cfg.seed);
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.below(i)]);
    std::size_t cut = idx.size() - idx.size() / 5;
    std::vector<int> train_idx(idx.begin(), idx.begin() + cut);
    std::vector<int> val_idx(idx.begin() + cut, idx.end());

    TrainResult res = train(ds, colorings, train_idx, val_idx, cfg);

    std::ostringstream csv;
    csv << "epoch,split,loss,accuracy\n";
    for (std::size_t e = 0; e < res.history.size(); ++e) {
        csv << e << ",train," << format_double(res.history[e].train_loss) << ","
            << format_double(res.history[e].train_acc) << "\n";
        csv << e << ",val," << format_double(res.history[e].val_loss) << ","
            << format_double(res.history[e].val_acc) << "\n";
    }
    fs::path metrics = out, model = out;
    metrics += ".metrics.csv";
    model += ".model.json";
    atomic_write(metrics, csv.str());

    nlohmann::ordered_json j;
    j["layers"] = cfg.layers;
    j["width"] = cfg.width;
    j["combine"] = cfg.combine == CombineMode::add
                       ? "add"
                       : cfg.combine == CombineMode::concat ? "concat" : "none";
    j["seed"] = cfg.seed;
    j["best_val_acc"] = res.best_val_acc;
    j["best_epoch"] = res.best_epoch;
    auto flat = [](const std::vector<DenseMatrix>& ms) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& m : ms)
            arr.push_back({{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}});
        return arr;
    };
    j["w"] = flat(res.params.w);
    j["embed"] = flat(res.params.embed);
    atomic_write(model, j.dump() + "\n");

    mf.outputs = {metrics.string(), model.string()};
    mf.write(model);
    std::cout << "best_val_acc=" << format_double(res.best_val_acc) << "\n";
    return 0;
}

int cmd_stats(const fs::path& in, const std::string& coloring, int layers, int jobs,
              const fs::path& out, RunManifest& mf) {
    Dataset ds = load_dataset(in);
    mf.add_input(in);

    // coloring is a single spec, or "tree:a..b" for a height sweep.
    std::vector<std::string> specs;
    std::size_t dots = coloring.find("..");
    if (coloring.rfind("tree:", 0) == 0 && dots != std::string::npos) {
        int lo = std::stoi(coloring.substr(5, dots - 5));
        int hi = std::stoi(coloring.substr(dots + 2));
        for (int h = lo; h <= hi; ++h) specs.push_back("tree:" + std::to_string(h));
    } else {
        specs.push_back(coloring);
    }

    std::ostringstream csv;
    csv << "h,avg_nodes,percent_saved\n";
    for (const auto& spec : specs) {
        std::vector<double> totals(ds.graphs.size()), saved(ds.graphs.size());
        parallel_for(ds.graphs.size(), jobs, [&](std::size_t i) {
            const Graph& g = ds.graphs[i];
            ColorAssignment c = coloring_from_spec(g, spec);
            LayeredBasis basis = canonical_search(g, c, layers);
            NodeStats st = node_stats(basis, layers);
            totals[i] = static_cast<double>(st.total);
            saved[i] = st.percent_saved;
        });
        double at = 0, as = 0;
        for (std::size_t i = 0; i < totals.size(); ++i) {
            at += totals[i];
            as += saved[i];
        }
        at /= totals.size();
        as /= totals.size();
        std::string label = spec.rfind("tree:", 0) == 0 ? spec.substr(5) : spec;
        csv << label << "," << format_double(at) << "," << format_double(as) << "\n";
    }
    atomic_write(out, csv.str());
    mf.outputs.push_back(out.string());
    mf.write(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"efficient aggregation toolkit"};
    app.require_subcommand(1);

    std::string in, out, coloring = "degree", suite = "all", combine = "add",
                loss = "bce";
    int depth = 5, layers = 2, width = 8, n = 10, bits = 8, count = 1000, jobs = 1,
        epochs = 200, batch = 32;
    double lr = 1e-2, wd = 0.0, dropout = 0.0;
    std::uint64_t seed = 1, budget = 1000000;

    auto* pre = app.add_subcommand("precompute", "write the invariant artifact");
    pre->add_option("--in", in)->required();
    pre->add_option("--out", out)->required();
    pre->add_option("--coloring", coloring);
    pre->add_option("--depth", depth);

    auto* wk = app.add_subcommand("walks", "emit the walk refinement as CSV");
    wk->add_option("--in", in)->required();
    wk->add_option("--out", out)->required();
    wk->add_option("--coloring", coloring);
    wk->add_option("--depth", depth);

    auto* vf = app.add_subcommand("verify", "run invariant suites");
    vf->add_option("--suite", suite);
    vf->add_option("--seed", seed);

    auto* sep = app.add_subcommand("separate", "search for a separation pair");
    sep->add_option("--n", n);
    sep->add_option("--budget", budget);
    sep->add_option("--seed", seed);
    sep->add_option("--out", out)->required();

    auto* gen = app.add_subcommand("gen-synth", "generate the synthetic sum task");
    gen->add_option("--bits", bits);
    gen->add_option("--count", count);
    gen->add_option("--seed", seed);
    gen->add_option("--out", out)->required();

    auto* tr = app.add_subcommand("train", "train the caterpillar network");
    tr->add_option("--in", in)->required();
    tr->add_option("--out", out)->required();
    tr->add_option("--coloring", coloring);
    tr->add_option("--layers", layers);
    tr->add_option("--width", width);
    tr->add_option("--combine", combine);
    tr->add_option("--loss", loss);
    tr->add_option("--lr", lr);
    tr->add_option("--weight-decay", wd);
    tr->add_option("--dropout", dropout);
    tr->add_option("--epochs", epochs);
    tr->add_option("--batch", batch);
    tr->add_option("--seed", seed);
    tr->add_option("--jobs", jobs);

    auto* st = app.add_subcommand("stats", "node-savings accounting CSV");
    st->add_option("--in", in)->required();
    st->add_option("--out", out)->required();
    st->add_option("--coloring", coloring);
    st->add_option("--layers", layers);
    st->add_option("--jobs", jobs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage/message
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    RunManifest mf;
    mf.command = app.get_subcommands().front()->get_name();
    for (int i = 1; i < argc; ++i) mf.arguments.push_back(argv[i]);
    mf.seed = seed;

    try {
        if (pre->parsed()) return cmd_precompute(in, coloring, depth, out, mf);
        if (wk->parsed()) return cmd_walks(in, coloring, depth, out, mf);
        if (vf->parsed()) return cmd_verify(suite, seed);
        if (sep->parsed()) return cmd_separate(n, budget, seed, out, mf);
        if (gen->parsed()) return cmd_gen_synth(bits, count, seed, out, mf);
        if (tr->parsed()) {
            ModelConfig cfg;
            cfg.layers = layers;
            cfg.width = width;
            cfg.combine = combine == "concat"
                              ? CombineMode::concat
                              : combine == "none" ? CombineMode::none : CombineMode::add;
            cfg.loss = loss == "mse" ? LossKind::mse : LossKind::bce;
            cfg.lr = lr;
            cfg.weight_decay = wd;
            cfg.dropout = dropout;
            cfg.epochs = epochs;
            cfg.batch_size = batch;
            cfg.seed = seed;
            return cmd_train(in, coloring, cfg, jobs, out, mf);
        }
        if (st->parsed()) return cmd_stats(in, coloring, layers, jobs, out, mf);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
