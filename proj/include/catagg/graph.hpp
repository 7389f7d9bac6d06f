#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "catagg/matrix.hpp"

namespace catagg {

/// Simple undirected graph with optional categorical vertex features.
/// Immutable after construction; edges stored normalized (u < v, sorted).
class Graph {
public:
    Graph() = default;
    Graph(int n, std::vector<std::pair<int, int>> edges,
          std::vector<std::string> features = {});

    int size() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int u) const { return adj_[u]; }
    int degree(int u) const { return static_cast<int>(adj_[u].size()); }
    bool has_edge(int u, int v) const;

    bool has_features() const { return !features_.empty(); }
    const std::string& feature(int u) const { return features_[u]; }
    const std::vector<std::string>& features() const { return features_; }

    bool connected() const;
    std::vector<int> sorted_degree_sequence() const;

    bool operator==(const Graph& o) const {
        return n_ == o.n_ && edges_ == o.edges_ && features_ == o.features_;
    }

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::string> features_;
    std::vector<std::vector<int>> adj_;
};

struct Dataset {
    std::vector<Graph> graphs;
    std::vector<double> targets;
    std::string name;
};

enum class GraphFormat { json, tudataset };

/// Reads a graph collection. JSON files hold one object or an array of
/// objects {"n":..,"edges":[[u,v],..],"features":[..]?,"target":..?};
/// TUDataset directories hold DS_A.txt / DS_graph_indicator.txt /
/// DS_graph_labels.txt and optionally DS_node_labels.txt.
Dataset load_graph_collection(const std::filesystem::path& path, GraphFormat format);

std::string graph_to_json(const Graph& g, const double* target = nullptr);
std::string dataset_to_json(const Dataset& ds);
Graph graph_from_json(const std::string& text);

RationalMatrix adjacency_matrix(const Graph& g);
RationalMatrix degree_matrix(const Graph& g);

/// Erdős–Rényi G(n, p); pure function of (n, p, seed).
Graph random_graph(int n, double p, std::uint64_t seed);

Graph permute_graph(const Graph& g, const std::vector<int>& perm);

/// Removes two existing edges and adds two absent vertex pairs.
Graph two_switch(const Graph& g, std::pair<int, int> rm1, std::pair<int, int> rm2,
                 std::pair<int, int> add1, std::pair<int, int> add2);

/// Synthetic sum-classification task: each graph encodes two B-bit
/// integers; label 1 iff they sum to N = 2^(B-1). Exactly floor(count/2)
/// positive examples, enforced by rejection sampling.
Dataset gen_sum_dataset(int bits, int count, std::uint64_t seed);

/// The graph encoding used by gen_sum_dataset, exposed for tests:
/// root 0, two paths of B position vertices each hanging off the root,
/// and a pendant leaf on position j of path i iff bit j of x_i is set.
Graph encode_sum_instance(int bits, std::uint64_t x1, std::uint64_t x2);

}  // namespace catagg
