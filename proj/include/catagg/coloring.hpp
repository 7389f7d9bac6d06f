#pragma once

#include <string>
#include <vector>

#include "catagg/graph.hpp"

namespace catagg {

/// Canonical per-vertex color strings plus the sorted alphabet of colors
/// present. Strings are pure functions of the rooted color structure, so
/// vertices of different graphs compare directly. height records the
/// refinement height, or a sentinel for the non-refinement colorings.
struct ColorAssignment {
    static constexpr int kSpecial = -1;

    std::vector<std::string> colors;   // indexed by vertex
    std::vector<std::string> alphabet; // strictly sorted
    int height = kSpecial;

    int alphabet_index(const std::string& color) const;
};

enum class SpecialColoring { trivial, identity, degree };

/// Degree refinement χ(h). Encoding of χ(h+1)(u) is
/// "(" + χ(h)(u) + "|" + sorted comma-joined χ(h) over N(u) + ")",
/// so string equality coincides with refinement-color equality across
/// graphs. Refinement stops early once the partition stabilizes; later
/// rounds cannot split any class, and the capped strings remain
/// equality-faithful for the requested height.
ColorAssignment tree_coloring(const Graph& g, int h);

/// Same refinement run jointly on several graphs (as a disjoint union),
/// so the returned strings and any stabilization cap are shared. Use this
/// when colorings of different graphs must be byte-comparable.
std::vector<ColorAssignment> tree_coloring_joint(const std::vector<const Graph*>& graphs, int h);

ColorAssignment special_coloring(const Graph& g, SpecialColoring kind);

/// Combined coloring pairing the vertex feature token with χ(h). Graphs
/// without features use a constant token. h = ColorAssignment::kSpecial
/// selects identity-feature mode: the refinement component is replaced by
/// the identity coloring (the message-passing extreme).
ColorAssignment combined_coloring(const Graph& g, int h);
std::vector<ColorAssignment> combined_coloring_joint(const std::vector<const Graph*>& graphs, int h);

/// Diagonal 0/1 projection onto the class of color `a`.
RationalMatrix partition_matrix(const Graph& g, const ColorAssignment& c, const std::string& a);

/// Parses the CLI coloring syntax: trivial | identity | degree | tree:h |
/// combined:h. Returns the assignment for one graph.
ColorAssignment coloring_from_spec(const Graph& g, const std::string& spec);

}  // namespace catagg
