#include "catagg/coloring.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace catagg {

int ColorAssignment::alphabet_index(const std::string& color) const {
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), color);
    if (it == alphabet.end() || *it != color)
        throw std::invalid_argument("color not in alphabet: " + color);
    return static_cast<int>(it - alphabet.begin());
}

namespace {

std::vector<std::string> sorted_distinct(const std::vector<std::string>& colors) {
    std::set<std::string> s(colors.begin(), colors.end());
    return {s.begin(), s.end()};
}

std::size_t class_count(const std::vector<std::string>& colors) {
    return std::set<std::string>(colors.begin(), colors.end()).size();
}

std::string pad_index(int u, int n) {
    int width = 1;
    for (int m = n - 1; m >= 10; m /= 10) ++width;
    std::string s = std::to_string(u);
    return std::string(width - s.size(), '0') + s;
}

}  // namespace

std::vector<ColorAssignment> tree_coloring_joint(const std::vector<const Graph*>& graphs, int h) {
    if (h < 0) throw std::invalid_argument("tree_coloring: negative height");
    std::size_t total = 0;
    for (auto* g : graphs) total += g->size();

    std::vector<std::string> cur(total, "0");
    std::size_t classes = 1;
    for (int round = 0; round < h; ++round) {
        std::vector<std::string> next(total);
        std::size_t offset = 0;
        for (auto* g : graphs) {
            for (int u = 0; u < g->size(); ++u) {
                std::vector<std::string> nb;
                nb.reserve(g->neighbors(u).size());
                for (int v : g->neighbors(u)) nb.push_back(cur[offset + v]);
                std::sort(nb.begin(), nb.end());
                std::string enc = "(" + cur[offset + u] + "|";
                for (std::size_t i = 0; i < nb.size(); ++i) {
                    if (i) enc += ",";
                    enc += nb[i];
                }
                enc += ")";
                next[offset + u] = std::move(enc);
            }
            offset += g->size();
        }
        std::size_t next_classes = class_count(next);
        if (next_classes == classes) break;  // partition stable: stop growing strings
        classes = next_classes;
        cur = std::move(next);
    }

    std::vector<ColorAssignment> out;
    out.reserve(graphs.size());
    std::size_t offset = 0;
    for (auto* g : graphs) {
        ColorAssignment c;
        c.colors.assign(cur.begin() + offset, cur.begin() + offset + g->size());
        c.alphabet = sorted_distinct(c.colors);
        c.height = h;
        out.push_back(std::move(c));
        offset += g->size();
    }
    return out;
}

ColorAssignment tree_coloring(const Graph& g, int h) {
    return tree_coloring_joint({&g}, h)[0];
}

ColorAssignment special_coloring(const Graph& g, SpecialColoring kind) {
    ColorAssignment c;
    c.colors.resize(g.size());
    switch (kind) {
        case SpecialColoring::trivial:
            std::fill(c.colors.begin(), c.colors.end(), "0");
            break;
        case SpecialColoring::identity:
            // Zero-padded so lexicographic alphabet order equals vertex order.
            for (int u = 0; u < g.size(); ++u) c.colors[u] = pad_index(u, g.size());
            break;
        case SpecialColoring::degree:
            for (int u = 0; u < g.size(); ++u) c.colors[u] = std::to_string(g.degree(u));
            break;
    }
    c.alphabet = sorted_distinct(c.colors);
    return c;
}

namespace {

std::vector<ColorAssignment> combine_with_features(const std::vector<const Graph*>& graphs,
                                                   std::vector<ColorAssignment> base, int h) {
    std::vector<ColorAssignment> out;
    out.reserve(graphs.size());
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        const Graph& g = *graphs[k];
        ColorAssignment c;
        c.colors.resize(g.size());
        for (int u = 0; u < g.size(); ++u) {
            const std::string tok = g.has_features() ? g.feature(u) : std::string{};
            c.colors[u] = "[" + tok + "|" + base[k].colors[u] + "]";
        }
        c.alphabet = sorted_distinct(c.colors);
        c.height = h;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

std::vector<ColorAssignment> combined_coloring_joint(const std::vector<const Graph*>& graphs,
                                                     int h) {
    std::vector<ColorAssignment> base;
    if (h == ColorAssignment::kSpecial) {
        base.reserve(graphs.size());
        for (auto* g : graphs) base.push_back(special_coloring(*g, SpecialColoring::identity));
    } else {
        base = tree_coloring_joint(graphs, h);
    }
    return combine_with_features(graphs, std::move(base), h);
}

ColorAssignment combined_coloring(const Graph& g, int h) {
    return combined_coloring_joint({&g}, h)[0];
}

RationalMatrix partition_matrix(const Graph& g, const ColorAssignment& c, const std::string& a) {
    c.alphabet_index(a);  // throws on unknown color
    RationalMatrix p(g.size(), g.size());
    for (int u = 0; u < g.size(); ++u)
        if (c.colors[u] == a) p.at(u, u) = 1;
    return p;
}

ColorAssignment coloring_from_spec(const Graph& g, const std::string& spec) {
    if (spec == "trivial") return special_coloring(g, SpecialColoring::trivial);
    if (spec == "identity") return special_coloring(g, SpecialColoring::identity);
    if (spec == "degree") return special_coloring(g, SpecialColoring::degree);
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        const std::string arg = spec.substr(colon + 1);
        if (kind == "tree") return tree_coloring(g, std::stoi(arg));
        if (kind == "combined") {
            if (arg == "identity") return combined_coloring(g, ColorAssignment::kSpecial);
            return combined_coloring(g, std::stoi(arg));
        }
    }
    throw std::invalid_argument("unknown coloring spec: " + spec);
}

}  // namespace catagg
