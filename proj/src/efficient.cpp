#include "catagg/efficient.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace catagg {

namespace {

// Incremental exact rank oracle. The hot path eliminates modulo the
// Mersenne prime 2^61-1: independence mod p certifies independence over
// the rationals, so only candidates that vanish mod p (a null-probability
// event for independent ones) fall back to exact elimination against the
// accepted columns.
class EchelonBasis {
public:
    static constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

    bool try_insert(const std::vector<BigInt>& v) {
        std::vector<std::uint64_t> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            r[i] = mpz_fdiv_ui(v[i].get_mpz_t(), kPrime);
        for (const auto& row : mod_rows_) {
            std::uint64_t lead = r[row.pivot];
            if (lead == 0) continue;
            for (std::size_t j = row.pivot; j < r.size(); ++j)
                r[j] = sub_mod(r[j], mul_mod(lead, row.values[j]));
        }
        std::size_t p = 0;
        while (p < r.size() && r[p] == 0) ++p;
        bool independent = p < r.size() || exactly_independent(v);
        if (!independent) return false;
        accepted_.push_back(v);
        if (p < r.size()) {
            std::uint64_t inv = inv_mod(r[p]);
            for (std::size_t j = p; j < r.size(); ++j) r[j] = mul_mod(r[j], inv);
            mod_rows_.push_back({p, std::move(r)});
        }
        return true;
    }

    std::size_t rank() const { return accepted_.size(); }

private:
    struct ModRow {
        std::size_t pivot;
        std::vector<std::uint64_t> values;
    };

    static std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>(
            static_cast<unsigned __int128>(a) * b % kPrime);
    }
    static std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b) {
        return a >= b ? a - b : a + kPrime - b;
    }
    static std::uint64_t inv_mod(std::uint64_t a) {
        // Fermat: a^(p-2) mod p.
        std::uint64_t e = kPrime - 2, out = 1;
        while (e) {
            if (e & 1) out = mul_mod(out, a);
            a = mul_mod(a, a);
            e >>= 1;
        }
        return out;
    }

    struct ExactRow {
        std::size_t pivot;
        std::vector<Rational> values;  // normalized: values[pivot] == 1
    };

    // Reduces v against the exact echelon rows; returns the residual.
    std::vector<Rational> reduce_exact(const std::vector<BigInt>& v) const {
        std::vector<Rational> r(v.begin(), v.end());
        for (const ExactRow& row : exact_rows_) {
            const Rational lead = r[row.pivot];
            if (lead == 0) continue;
            for (std::size_t j = row.pivot; j < r.size(); ++j)
                r[j] -= lead * row.values[j];
        }
        return r;
    }

    // Exact independence of v from the accepted columns. The rational
    // echelon is built lazily (first call at this level) and extended
    // incrementally as further columns are accepted.
    bool exactly_independent(const std::vector<BigInt>& v) const {
        while (exact_synced_ < accepted_.size()) {
            std::vector<Rational> r = reduce_exact(accepted_[exact_synced_]);
            std::size_t p = 0;
            while (p < r.size() && r[p] == 0) ++p;
            // Accepted columns are independent, so a pivot always exists.
            const Rational inv = 1 / r[p];
            for (std::size_t j = p; j < r.size(); ++j) r[j] *= inv;
            exact_rows_.push_back({p, std::move(r)});
            ++exact_synced_;
        }
        for (const Rational& x : reduce_exact(v))
            if (x != 0) return true;
        return false;
    }

    std::vector<ModRow> mod_rows_;
    std::vector<std::vector<BigInt>> accepted_;
    mutable std::vector<ExactRow> exact_rows_;
    mutable std::size_t exact_synced_ = 0;
};

std::vector<BigInt> extend_column(const Graph& g, const ColorAssignment& c,
                                  std::size_t color, const std::vector<BigInt>& prev,
                                  bool apply_adjacency) {
    int n = g.size();
    std::vector<BigInt> out(n, 0);
    for (int u = 0; u < n; ++u) {
        if (c.alphabet_index(c.colors[u]) != color) continue;
        if (apply_adjacency) {
            for (int v : g.neighbors(u)) out[u] += prev[v];
        } else {
            out[u] = prev[u];
        }
    }
    return out;
}

}  // namespace

int LayeredBasis::last_nonempty_level() const {
    for (int t = depth(); t >= 0; --t)
        if (!words[t].empty()) return t;
    return 0;
}

LayeredBasis canonical_search(const Graph& g, const ColorAssignment& c, int T) {
    if (T < 0) throw std::invalid_argument("canonical_search: negative depth");
    int n = g.size();
    LayeredBasis basis;
    basis.n = n;
    basis.words.assign(T + 1, {});
    basis.columns.assign(T + 1, {});

    basis.words[0].push_back({});  // empty word
    basis.columns[0].push_back(std::vector<BigInt>(n, 1));

    std::size_t sigma = c.alphabet.size();
    for (int t = 0; t < T; ++t) {
        EchelonBasis rank;
        // Parents are visited in S_t order and colors in alphabet order,
        // so candidates arrive in lexicographic order of the new word.
        for (std::size_t k = 0; k < basis.words[t].size(); ++k) {
            for (std::size_t a = 0; a < sigma; ++a) {
                if (rank.rank() == static_cast<std::size_t>(n)) break;
                std::vector<BigInt> col =
                    extend_column(g, c, a, basis.columns[t][k], t > 0);
                bool zero = true;
                for (const auto& x : col)
                    if (x != 0) { zero = false; break; }
                if (zero) continue;
                if (!rank.try_insert(col)) continue;
                Word w = basis.words[t][k];
                w.push_back(c.alphabet[a]);
                basis.words[t + 1].push_back(std::move(w));
                basis.columns[t + 1].push_back(std::move(col));
            }
        }
    }
    return basis;
}

RationalMatrix basis_matrix(const LayeredBasis& basis, int t) {
    if (t < 0 || t > basis.depth())
        throw std::out_of_range("basis_matrix: level out of range");
    RationalMatrix b(basis.n, basis.columns[t].size());
    for (std::size_t k = 0; k < basis.columns[t].size(); ++k)
        for (int u = 0; u < basis.n; ++u)
            b.at(u, k) = Rational(basis.columns[t][k][u]);
    return b;
}

RationalMatrix basis_left_inverse(const LayeredBasis& basis, int t) {
    RationalMatrix b = basis_matrix(basis, t);
    RationalMatrix bt = b.transpose();
    if (b.cols() == 0) return bt;  // 0×n, vacuously a left inverse
    RationalMatrix gram = bt * b;
    return gram.inverse() * bt;
}

RationalMatrix efficient_matrix(const LayeredBasis& basis, int t, const RationalMatrix& m) {
    if (m.rows() != static_cast<std::size_t>(basis.n) || m.cols() != m.rows())
        throw std::invalid_argument("efficient_matrix: operand must be n×n");
    if (t < 0 || t + 1 > basis.depth())
        throw std::out_of_range("efficient_matrix: level out of range");
    return basis_left_inverse(basis, t) * m * basis_matrix(basis, t + 1);
}

DenseMatrix efficient_matrix_float(const LayeredBasis& basis, int t, const DenseMatrix& m) {
    if (m.rows() != static_cast<std::size_t>(basis.n) || m.cols() != m.rows())
        throw std::invalid_argument("efficient_matrix_float: operand must be n×n");
    if (t < 0 || t + 1 > basis.depth())
        throw std::out_of_range("efficient_matrix_float: level out of range");
    DenseMatrix pinv = to_double(basis_left_inverse(basis, t));
    DenseMatrix b1 = to_double(basis_matrix(basis, t + 1));
    return pinv * m * b1;
}

bool EfficientStack::operator==(const EfficientStack& o) const {
    if (n != o.n || node_counts != o.node_counts || levels.size() != o.levels.size())
        return false;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i].source_words != o.levels[i].source_words) return false;
        if (levels[i].target_words != o.levels[i].target_words) return false;
        if (!(levels[i].ca == o.levels[i].ca)) return false;
        if (!(levels[i].ci == o.levels[i].ci)) return false;
    }
    return true;
}

EfficientStack invariant_stack(const Graph& g, const ColorAssignment& c, int depth) {
    int n = g.size();
    int T = depth < 0 ? n : depth;
    LayeredBasis basis = canonical_search(g, c, T);
    RationalMatrix adj = adjacency_matrix(g);
    RationalMatrix eye = RationalMatrix::identity(n);

    EfficientStack stack;
    stack.n = n;
    for (int t = 0; t <= T; ++t) stack.node_counts.push_back(basis.level_size(t));
    for (int t = 0; t < T; ++t) {
        EfficientStack::Level lvl;
        lvl.source_words = basis.words[t];
        lvl.target_words = basis.words[t + 1];
        lvl.ca = efficient_matrix(basis, t, adj);
        lvl.ci = efficient_matrix(basis, t, eye);
        stack.levels.push_back(std::move(lvl));
    }
    return stack;
}

namespace {

nlohmann::ordered_json words_to_json(const std::vector<Word>& ws) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& w : ws) arr.push_back(word_to_string(w));
    return arr;
}

std::vector<Word> words_from_json(const nlohmann::ordered_json& arr) {
    std::vector<Word> out;
    for (const auto& item : arr) out.push_back(word_from_string(item.get<std::string>()));
    return out;
}

nlohmann::ordered_json matrix_to_json(const RationalMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back(to_fraction_string(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

RationalMatrix matrix_from_json(const nlohmann::ordered_json& rows, std::size_t cols) {
    RationalMatrix m(rows.size(), rows.empty() ? cols : rows[0].size());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            m.at(i, j) = fraction_from_string(rows[i][j].get<std::string>());
    return m;
}

}  // namespace

std::string serialize_stack(const EfficientStack& s) {
    nlohmann::ordered_json j;
    j["n"] = s.n;
    j["node_counts"] = s.node_counts;
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& lvl : s.levels) {
        nlohmann::ordered_json l;
        l["words"] = words_to_json(lvl.source_words);
        l["CA"] = matrix_to_json(lvl.ca);
        l["CI"] = matrix_to_json(lvl.ci);
        levels.push_back(std::move(l));
    }
    j["levels"] = std::move(levels);
    if (!s.levels.empty())
        j["terminal_words"] = words_to_json(s.levels.back().target_words);
    return j.dump();
}

EfficientStack deserialize_stack(const std::string& text) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(text);
    EfficientStack s;
    s.n = j.at("n").get<int>();
    s.node_counts = j.at("node_counts").get<std::vector<std::size_t>>();
    const auto& levels = j.at("levels");
    for (std::size_t t = 0; t < levels.size(); ++t) {
        EfficientStack::Level lvl;
        lvl.source_words = words_from_json(levels[t].at("words"));
        lvl.target_words = t + 1 < levels.size()
                               ? words_from_json(levels[t + 1].at("words"))
                               : words_from_json(j.at("terminal_words"));
        lvl.ca = matrix_from_json(levels[t].at("CA"), lvl.target_words.size());
        lvl.ci = matrix_from_json(levels[t].at("CI"), lvl.target_words.size());
        s.levels.push_back(std::move(lvl));
    }
    return s;
}

DenseMatrix augmented_normalized_adjacency(const Graph& g) {
    int n = g.size();
    DenseMatrix out(n, n);
    std::vector<double> inv_sqrt(n);
    for (int u = 0; u < n; ++u)
        inv_sqrt[u] = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) + 2.0);
    for (int u = 0; u < n; ++u) {
        out.at(u, u) = 2.0 * inv_sqrt[u] * inv_sqrt[u];
        for (int v : g.neighbors(u)) out.at(u, v) = inv_sqrt[u] * inv_sqrt[v];
    }
    return out;
}

NodeStats node_stats(const LayeredBasis& basis, int layers) {
    if (layers < 0 || layers > basis.depth())
        throw std::out_of_range("node_stats: layer count exceeds basis depth");
    NodeStats st;
    for (int t = layers; t >= 0; --t) {
        st.widths.push_back(basis.level_size(t));
        st.total += basis.level_size(t);
    }
    double baseline = static_cast<double>(basis.n) * layers + 1.0;
    st.percent_saved = 1.0 - static_cast<double>(st.total) / baseline;
    return st;
}

}  // namespace catagg
