#include "catagg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "catagg/rng.hpp"
#include "json.hpp"

namespace catagg {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Graph::Graph(int n, std::vector<std::pair<int, int>> edges, std::vector<std::string> features)
    : n_(n), features_(std::move(features)) {
    if (n < 0) throw std::invalid_argument("Graph: negative vertex count");
    if (!features_.empty() && static_cast<int>(features_.size()) != n)
        throw std::invalid_argument("Graph: feature list size differs from vertex count");
    std::set<std::pair<int, int>> seen;
    edges_.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u == v) throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(u));
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("Graph: edge endpoint out of range");
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second)
            throw std::invalid_argument("Graph: duplicate edge {" + std::to_string(u) + "," +
                                        std::to_string(v) + "}");
    }
    edges_.assign(seen.begin(), seen.end());
    adj_.assign(n, {});
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(u, v));
}

bool Graph::connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj_[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
    }
    return reached == n_;
}

std::vector<int> Graph::sorted_degree_sequence() const {
    std::vector<int> d(n_);
    for (int u = 0; u < n_; ++u) d[u] = degree(u);
    std::sort(d.begin(), d.end());
    return d;
}

RationalMatrix adjacency_matrix(const Graph& g) {
    RationalMatrix a(g.size(), g.size());
    for (auto [u, v] : g.edges()) {
        a.at(u, v) = 1;
        a.at(v, u) = 1;
    }
    return a;
}

RationalMatrix degree_matrix(const Graph& g) {
    RationalMatrix d(g.size(), g.size());
    for (int u = 0; u < g.size(); ++u) d.at(u, u) = g.degree(u);
    return d;
}

namespace {

Graph graph_from_object(const nlohmann::json& j, double* target_out) {
    if (!j.contains("n") || !j.contains("edges"))
        throw std::runtime_error("graph object needs fields \"n\" and \"edges\"");
    int n = j.at("n").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::runtime_error("edge must be a pair [u,v]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    std::vector<std::string> features;
    if (j.contains("features"))
        for (const auto& f : j.at("features"))
            features.push_back(f.is_string() ? f.get<std::string>() : f.dump());
    if (target_out) *target_out = j.value("target", 0.0);
    return Graph(n, std::move(edges), std::move(features));
}

Dataset load_json_collection(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("parse error in " + path.string() + ": " + e.what());
    }
    Dataset ds;
    ds.name = path.stem().string();
    if (j.is_object()) j = nlohmann::json::array({j});
    if (!j.is_array()) throw std::runtime_error("expected a graph object or array of objects");
    for (const auto& obj : j) {
        double target = 0.0;
        ds.graphs.push_back(graph_from_object(obj, &target));
        ds.targets.push_back(target);
    }
    return ds;
}

std::filesystem::path find_tud_file(const std::filesystem::path& dir, const std::string& suffix,
                                    bool required) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            return entry.path();
    }
    if (required) throw std::runtime_error("missing *" + suffix + " in " + dir.string());
    return {};
}

Dataset load_tudataset(const std::filesystem::path& dir) {
    auto a_path = find_tud_file(dir, "_A.txt", true);
    auto ind_path = find_tud_file(dir, "_graph_indicator.txt", true);
    auto lab_path = find_tud_file(dir, "_graph_labels.txt", true);
    auto node_path = find_tud_file(dir, "_node_labels.txt", false);

    std::vector<int> indicator;  // 1-indexed graph id per vertex
    {
        std::ifstream in(ind_path);
        int gid;
        while (in >> gid) indicator.push_back(gid);
    }
    if (indicator.empty()) throw std::runtime_error("empty graph indicator file");
    int num_graphs = *std::max_element(indicator.begin(), indicator.end());

    std::vector<int> vertex_offset(num_graphs + 1, 0);  // first global vertex of each graph
    std::vector<int> graph_size(num_graphs + 1, 0);
    for (std::size_t v = 0; v < indicator.size(); ++v) ++graph_size[indicator[v]];
    for (int gi = 2; gi <= num_graphs; ++gi)
        vertex_offset[gi] = vertex_offset[gi - 1] + graph_size[gi - 1];

    std::vector<std::set<std::pair<int, int>>> edges(num_graphs + 1);
    {
        std::ifstream in(a_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            int u1, v1;
            if (!(ls >> u1 >> v1)) throw std::runtime_error("malformed edge line: " + line);
            if (u1 < 1 || v1 < 1 || u1 > static_cast<int>(indicator.size()) ||
                v1 > static_cast<int>(indicator.size()))
                throw std::runtime_error("edge endpoint out of range in " + a_path.string());
            int gi = indicator[u1 - 1];
            if (gi != indicator[v1 - 1]) throw std::runtime_error("edge crosses graph boundary");
            int u = u1 - 1 - vertex_offset[gi];
            int v = v1 - 1 - vertex_offset[gi];
            if (u > v) std::swap(u, v);
            if (u != v) edges[gi].insert({u, v});
            else throw std::runtime_error("self-loop in " + a_path.string());
        }
    }

    std::vector<std::string> node_labels;
    if (!node_path.empty()) {
        std::ifstream in(node_path);
        std::string tok;
        while (in >> tok) node_labels.push_back(tok);
        if (node_labels.size() != indicator.size())
            throw std::runtime_error("node label count differs from vertex count");
    }

    Dataset ds;
    ds.name = dir.filename().string();
    {
        std::ifstream in(lab_path);
        double y;
        while (in >> y) ds.targets.push_back(y);
    }
    if (static_cast<int>(ds.targets.size()) != num_graphs)
        throw std::runtime_error("graph label count differs from graph count");

    for (int gi = 1; gi <= num_graphs; ++gi) {
        std::vector<std::string> feats;
        if (!node_labels.empty())
            feats.assign(node_labels.begin() + vertex_offset[gi],
                         node_labels.begin() + vertex_offset[gi] + graph_size[gi]);
        ds.graphs.emplace_back(graph_size[gi],
                               std::vector<std::pair<int, int>>(edges[gi].begin(), edges[gi].end()),
                               std::move(feats));
    }
    return ds;
}

}  // namespace

Dataset load_graph_collection(const std::filesystem::path& path, GraphFormat format) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("no such path: " + path.string());
    switch (format) {
        case GraphFormat::json:
            return load_json_collection(path);
        case GraphFormat::tudataset:
            return load_tudataset(path);
    }
    throw std::logic_error("unknown format");
}

std::string graph_to_json(const Graph& g, const double* target) {
    nlohmann::json j;
    j["n"] = g.size();
    j["edges"] = nlohmann::json::array();
    for (auto [u, v] : g.edges()) j["edges"].push_back({u, v});
    if (g.has_features()) j["features"] = g.features();
    if (target) j["target"] = *target;
    return j.dump();
}

std::string dataset_to_json(const Dataset& ds) {
    std::string out = "[";
    for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
        if (i) out += ",";
        out += graph_to_json(ds.graphs[i], &ds.targets[i]);
    }
    out += "]";
    return out;
}

Graph graph_from_json(const std::string& text) {
    return graph_from_object(nlohmann::json::parse(text), nullptr);
}

Graph random_graph(int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("random_graph: p outside [0,1]");
    Rng rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform() < p) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
}

Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
    const int n = g.size();
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permute_graph: permutation size differs from vertex count");
    std::vector<char> hit(n, 0);
    for (int x : perm) {
        if (x < 0 || x >= n || hit[x])
            throw std::invalid_argument("permute_graph: not a bijection on vertices");
        hit[x] = 1;
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(g.edges().size());
    for (auto [u, v] : g.edges()) edges.emplace_back(perm[u], perm[v]);
    std::vector<std::string> feats;
    if (g.has_features()) {
        feats.resize(n);
        for (int u = 0; u < n; ++u) feats[perm[u]] = g.feature(u);
    }
    return Graph(n, std::move(edges), std::move(feats));
}

Graph two_switch(const Graph& g, std::pair<int, int> rm1, std::pair<int, int> rm2,
                 std::pair<int, int> add1, std::pair<int, int> add2) {
    auto norm = [](std::pair<int, int> e) {
        if (e.first > e.second) std::swap(e.first, e.second);
        return e;
    };
    rm1 = norm(rm1), rm2 = norm(rm2), add1 = norm(add1), add2 = norm(add2);
    for (auto e : {rm1, rm2})
        if (!g.has_edge(e.first, e.second))
            throw std::invalid_argument("two_switch: removed edge not present");
    for (auto e : {add1, add2})
        if (e.first == e.second) throw std::invalid_argument("two_switch: added pair is a self-loop");
    std::vector<std::pair<int, int>> edges;
    for (auto e : g.edges())
        if (e != rm1 && e != rm2) edges.push_back(e);
    for (auto e : {add1, add2}) {
        if (std::find(edges.begin(), edges.end(), e) != edges.end())
            throw std::invalid_argument("two_switch: added pair already an edge");
        edges.push_back(e);
    }
    return Graph(g.size(), std::move(edges), g.features());
}

Graph encode_sum_instance(int bits, std::uint64_t x1, std::uint64_t x2) {
    // Vertex numbering: root 0; positions of path 1 are 1..B, of path 2 are
    // B+1..2B; pendant bit markers follow, path-major then position order.
    const int b = bits;
    std::vector<std::pair<int, int>> edges;
    edges.emplace_back(0, 1);
    edges.emplace_back(0, b + 1);
    for (int j = 1; j < b; ++j) {
        edges.emplace_back(j, j + 1);
        edges.emplace_back(b + j, b + j + 1);
    }
    int next = 2 * b + 1;
    std::uint64_t xs[2] = {x1, x2};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < b; ++j)
            if ((xs[i] >> j) & 1u) edges.emplace_back(i * b + j + 1, next++);
    return Graph(next, std::move(edges));
}

Dataset gen_sum_dataset(int bits, int count, std::uint64_t seed) {
    if (bits < 2) throw std::invalid_argument("gen_sum_dataset: bits must be >= 2");
    if (count < 2) throw std::invalid_argument("gen_sum_dataset: count must be >= 2");
    const std::uint64_t target_sum = 1ull << (bits - 1);
    const std::uint64_t max_offset = 2 * target_sum / 3;
    const int want_pos = count / 2;
    const int want_neg = count - want_pos;

    Rng rng(seed);
    Dataset ds;
    ds.name = "sum" + std::to_string(bits);
    int have_pos = 0, have_neg = 0;
    while (have_pos + have_neg < count) {
        std::uint64_t x1 = rng.below(target_sum + 1);
        std::uint64_t x2 = target_sum - x1;
        if (rng.coin()) {
            std::uint64_t off = 1 + rng.below(max_offset);
            (rng.coin() ? x1 : x2) += off;
        }
        const bool positive = (x1 + x2 == target_sum);
        // Rejection keeps the class counts exactly balanced.
        if (positive ? have_pos == want_pos : have_neg == want_neg) continue;
        (positive ? have_pos : have_neg)++;
        ds.graphs.push_back(encode_sum_instance(bits, x1, x2));
        ds.targets.push_back(positive ? 1.0 : 0.0);
    }
    return ds;
}

}  // namespace catagg
