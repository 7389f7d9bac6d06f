#include "catagg/walk.hpp"

#include <algorithm>
#include <stdexcept>

namespace catagg {

std::string word_to_string(const Word& w) {
    if (w.empty()) return "λ";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += "·";
        s += w[i];
    }
    return s;
}

Word word_from_string(const std::string& s) {
    if (s.empty() || s == "λ") return {};
    Word w;
    const std::string sep = "·";
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            w.push_back(s.substr(pos));
            break;
        }
        w.push_back(s.substr(pos, next - pos));
        pos = next + sep.size();
    }
    return w;
}

BigInt WalkColumn::total() const {
    BigInt s = 0;
    for (const auto& x : counts) s += x;
    return s;
}

namespace {

// counts <- P_a * counts
void mask_by_color(const ColorAssignment& c, const std::string& a, std::vector<BigInt>& counts) {
    for (std::size_t u = 0; u < counts.size(); ++u)
        if (c.colors[u] != a) counts[u] = 0;
}

// counts <- A * counts
std::vector<BigInt> adjacency_apply(const Graph& g, const std::vector<BigInt>& counts) {
    std::vector<BigInt> out(counts.size());
    for (int u = 0; u < g.size(); ++u)
        for (int v : g.neighbors(u)) out[u] += counts[v];
    return out;
}

}  // namespace

WalkColumn walk_column(const Graph& g, const ColorAssignment& c, const Word& word) {
    for (const auto& a : word) c.alphabet_index(a);  // throws on unknown symbol
    std::vector<BigInt> col(g.size(), 1);            // W_0[-, λ] = 1
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0) col = adjacency_apply(g, col);
        mask_by_color(c, word[i], col);
    }
    return {word, std::move(col)};
}

std::vector<WalkColumn> walk_columns(const Graph& g, const ColorAssignment& c,
                                     const std::vector<Word>& words) {
    std::vector<WalkColumn> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(walk_column(g, c, w));
    return out;
}

WalkRefinement walk_refinement(const Graph& g, const ColorAssignment& c, int t) {
    if (t < 0) throw std::invalid_argument("walk_refinement: negative length");
    std::vector<WalkColumn> level;
    level.push_back({Word{}, std::vector<BigInt>(g.size(), 1)});
    for (int step = 1; step <= t; ++step) {
        std::vector<WalkColumn> next;
        for (const auto& col : level) {
            std::vector<BigInt> propagated =
                step == 1 ? col.counts : adjacency_apply(g, col.counts);
            for (const auto& a : c.alphabet) {
                std::vector<BigInt> masked = propagated;
                mask_by_color(c, a, masked);
                if (std::any_of(masked.begin(), masked.end(),
                                [](const BigInt& x) { return x != 0; })) {
                    Word w = col.word;
                    w.push_back(a);
                    next.push_back({std::move(w), std::move(masked)});
                }
            }
        }
        level = std::move(next);
    }
    WalkRefinement wr;
    wr.t = t;
    for (const auto& col : level) wr.multiset[col.word] = col.total();
    return wr;
}

BigInt enumerate_walks_oracle(const Graph& g, const ColorAssignment& c, const Word& word) {
    if (word.size() > 8 || g.size() > 12)
        throw std::invalid_argument("enumerate_walks_oracle: guard exceeded (|word|<=8, n<=12)");
    if (word.empty()) return g.size();
    BigInt count = 0;
    // Iterative DFS over vertex sequences (u_1, ..., u_t).
    std::vector<int> stack;
    for (int u0 = 0; u0 < g.size(); ++u0) {
        if (c.colors[u0] != word[0]) continue;
        stack.assign(1, u0);
        std::vector<std::size_t> next_nb{0};
        while (!stack.empty()) {
            if (stack.size() == word.size()) {
                ++count;
                stack.pop_back();
                next_nb.pop_back();
                continue;
            }
            int u = stack.back();
            bool advanced = false;
            while (next_nb.back() < g.neighbors(u).size()) {
                int v = g.neighbors(u)[next_nb.back()++];
                if (c.colors[v] == word[stack.size()]) {
                    stack.push_back(v);
                    next_nb.push_back(0);
                    advanced = true;
                    break;
                }
            }
            if (!advanced) {
                stack.pop_back();
                next_nb.pop_back();
            }
        }
    }
    return count;
}

BigInt automaton_semantics(const Graph& g, const ColorAssignment& c,
                           const std::vector<AutomatonSymbol>& word) {
    for (const auto& s : word) {
        c.alphabet_index(s.a);
        if (s.is_edge) c.alphabet_index(s.b);
    }
    // 𝟙ᵀ M(w₁)···M(w_t) 𝟙 evaluated right to left.
    std::vector<BigInt> v(g.size(), 1);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (it->is_edge) {
            mask_by_color(c, it->b, v);
            v = adjacency_apply(g, v);
            mask_by_color(c, it->a, v);
        } else {
            mask_by_color(c, it->a, v);
        }
    }
    BigInt s = 0;
    for (const auto& x : v) s += x;
    return s;
}

std::vector<AutomatonSymbol> edge_symbol_word(const Word& colors) {
    std::vector<AutomatonSymbol> out;
    if (colors.empty()) return out;
    if (colors.size() == 1) {
        out.push_back(AutomatonSymbol::color(colors[0]));
        return out;
    }
    for (std::size_t i = 0; i + 1 < colors.size(); ++i)
        out.push_back(AutomatonSymbol::edge(colors[i], colors[i + 1]));
    return out;
}

}  // namespace catagg
