#include "catagg/catgnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "catagg/rng.hpp"

namespace catagg {

std::string word_token(const Word& w) {
    if (w.empty()) return "∅";
    const std::string& c = w.back();
    if (!c.empty() && c.front() == '[') {
        std::size_t bar = c.find('|');
        if (bar != std::string::npos) return c.substr(1, bar - 1);
    }
    return c;
}

void Params::zero() {
    for (auto& m : w) m *= 0.0;
    for (auto& m : embed) m *= 0.0;
}

Params Params::like_zero() const {
    Params g = *this;
    g.zero();
    return g;
}

double Params::clip_global_norm(double max_norm) {
    double sq = 0.0;
    for (const auto& m : w)
        for (double x : m.data()) sq += x * x;
    for (const auto& m : embed)
        for (double x : m.data()) sq += x * x;
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        double s = max_norm / norm;
        for (auto& m : w) m *= s;
        for (auto& m : embed) m *= s;
    }
    return norm;
}

namespace {

std::size_t input_width(const ModelConfig& cfg) {
    return cfg.combine == CombineMode::concat ? 2 * cfg.width : cfg.width;
}

bool reinjects(const ModelConfig& cfg) { return cfg.combine != CombineMode::none; }

DenseMatrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
    DenseMatrix m(rows, cols);
    double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& x : m.data()) x = (2.0 * rng.uniform() - 1.0) * s;
    return m;
}

// Y(l): rows of embed[l] selected by token id.
DenseMatrix gather(const DenseMatrix& table, const std::vector<int>& ids) {
    DenseMatrix out(ids.size(), table.cols());
    for (std::size_t r = 0; r < ids.size(); ++r)
        for (std::size_t j = 0; j < table.cols(); ++j)
            out.at(r, j) = table.at(ids[r], j);
    return out;
}

void scatter_add(DenseMatrix& table, const std::vector<int>& ids, const DenseMatrix& grad,
                 std::size_t col_offset = 0) {
    for (std::size_t r = 0; r < ids.size(); ++r)
        for (std::size_t j = 0; j < table.cols(); ++j)
            table.at(ids[r], j) += grad.at(r, col_offset + j);
}

DenseMatrix combine(const DenseMatrix& a, const DenseMatrix& y, CombineMode mode) {
    if (mode == CombineMode::none) return a;
    if (mode == CombineMode::add) return a + y;
    DenseMatrix out(a.rows(), a.cols() + y.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
        for (std::size_t j = 0; j < y.cols(); ++j) out.at(i, a.cols() + j) = y.at(i, j);
    }
    return out;
}

DenseMatrix relu(const DenseMatrix& z) {
    DenseMatrix out = z;
    for (double& x : out.data()) x = std::max(0.0, x);
    return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ForwardTrace {
    std::vector<DenseMatrix> inputs;   // F_j per chain step
    std::vector<DenseMatrix> pre_w;    // chain[j] * F_j
    std::vector<DenseMatrix> pre_act;  // (chain[j] * F_j) * w, standard steps only
    double logit = 0.0;
};

// The final chain step always pairs with the last weight matrix; the
// standard steps use the leading weights, so a truncated chain on a
// degenerate graph simply skips the deepest standard layers.
ForwardTrace run_forward(const GraphLayers& gl, const ModelConfig& cfg, const Params& p,
                         const DenseMatrix* dropout_mask) {
    int le = gl.effective_layers;
    ForwardTrace tr;
    DenseMatrix y0 = gather(p.embed[0], gl.tokens[0]);
    DenseMatrix f = cfg.combine == CombineMode::concat ? combine(y0, y0, cfg.combine)
                                                       : std::move(y0);
    for (int j = 0; j + 1 < le; ++j) {
        tr.inputs.push_back(f);
        DenseMatrix cf = gl.chain[j] * f;
        DenseMatrix z = cf * p.w[j];
        tr.pre_w.push_back(std::move(cf));
        tr.pre_act.push_back(z);
        f = reinjects(cfg)
                ? combine(relu(z), gather(p.embed[j + 1], gl.tokens[j + 1]), cfg.combine)
                : relu(z);
    }
    if (dropout_mask) f = hadamard(f, *dropout_mask);
    tr.inputs.push_back(f);
    DenseMatrix cf = gl.chain[le - 1] * f;
    DenseMatrix out = cf * p.w.back();
    tr.pre_w.push_back(std::move(cf));
    tr.logit = out.at(0, 0);
    return tr;
}

}  // namespace

Params init_params(const ModelConfig& cfg, const Vocab& vocab, std::uint64_t seed) {
    if (cfg.layers < 2) throw std::invalid_argument("init_params: need >= 2 layers");
    Rng rng(seed);
    Params p;
    std::size_t din = input_width(cfg);
    for (int l = 0; l + 1 < cfg.layers; ++l) p.w.push_back(glorot(din, cfg.width, rng));
    p.w.push_back(glorot(din, 1, rng));
    for (int l = 0; l < cfg.layers; ++l)
        p.embed.push_back(glorot(vocab.size(), cfg.width, rng));
    return p;
}

GraphLayers precompute_layers(const Graph& g, const ColorAssignment& c,
                              const ModelConfig& cfg, const Vocab& vocab) {
    LayeredBasis basis = canonical_search(g, c, cfg.layers);
    int le = std::min(cfg.layers, basis.last_nonempty_level());
    if (le < 1) throw std::invalid_argument("precompute_layers: empty graph");
    GraphLayers gl;
    gl.effective_layers = le;
    DenseMatrix agg = augmented_normalized_adjacency(g);
    for (int j = 0; j + 1 < le; ++j)
        gl.chain.push_back(efficient_matrix_float(basis, le - 1 - j, agg));
    gl.chain.push_back(to_double(
        efficient_matrix(basis, 0, RationalMatrix::identity(g.size()))));
    for (int j = 0; j < le; ++j) {
        std::vector<int> ids;
        for (const Word& w : basis.words[le - j]) ids.push_back(vocab.id(word_token(w)));
        gl.tokens.push_back(std::move(ids));
    }
    return gl;
}

double forward(const GraphLayers& gl, const ModelConfig& cfg, const Params& p,
               const DenseMatrix* dropout_mask) {
    return run_forward(gl, cfg, p, dropout_mask).logit;
}

double loss_value(double logit, double target, LossKind loss) {
    double s = sigmoid(logit);
    if (loss == LossKind::mse) {
        double d = s - target;
        return d * d;
    }
    constexpr double kEps = 1e-12;
    s = std::clamp(s, kEps, 1.0 - kEps);
    return -(target * std::log(s) + (1.0 - target) * std::log(1.0 - s));
}

double backward(const GraphLayers& gl, const ModelConfig& cfg, const Params& p,
                double target, Params& grad, const DenseMatrix* dropout_mask) {
    int le = gl.effective_layers;
    ForwardTrace tr = run_forward(gl, cfg, p, dropout_mask);
    double s = sigmoid(tr.logit);
    double dlogit = cfg.loss == LossKind::bce ? s - target
                                              : 2.0 * (s - target) * s * (1.0 - s);

    // Readout step.
    const DenseMatrix& cf_last = tr.pre_w[le - 1];
    for (std::size_t j = 0; j < cf_last.cols(); ++j)
        grad.w.back().at(j, 0) += cf_last.at(0, j) * dlogit;
    DenseMatrix dcf(1, cf_last.cols());
    for (std::size_t j = 0; j < cf_last.cols(); ++j)
        dcf.at(0, j) = p.w.back().at(j, 0) * dlogit;
    DenseMatrix df = gl.chain[le - 1].transpose() * dcf;
    if (dropout_mask) df = hadamard(df, *dropout_mask);

    std::size_t d = cfg.width;
    for (int j = le - 2; j >= 0; --j) {
        // Split the combine: first block came through the layer, the
        // second (or the sum) feeds the embedding table.
        DenseMatrix da(df.rows(), d);
        if (cfg.combine != CombineMode::concat) {
            da = df;
            if (cfg.combine == CombineMode::add)
                scatter_add(grad.embed[j + 1], gl.tokens[j + 1], df);
        } else {
            for (std::size_t i = 0; i < df.rows(); ++i)
                for (std::size_t k = 0; k < d; ++k) da.at(i, k) = df.at(i, k);
            scatter_add(grad.embed[j + 1], gl.tokens[j + 1], df, d);
        }
        DenseMatrix dz = da;
        for (std::size_t i = 0; i < dz.data().size(); ++i)
            if (tr.pre_act[j].data()[i] <= 0.0) dz.data()[i] = 0.0;
        grad.w[j] += tr.pre_w[j].transpose() * dz;
        df = gl.chain[j].transpose() * (dz * p.w[j].transpose());
    }

    // Initial features: in concat mode F0 duplicates Y0, so both halves
    // flow back into the table.
    if (cfg.combine != CombineMode::concat) {
        scatter_add(grad.embed[0], gl.tokens[0], df);
    } else {
        scatter_add(grad.embed[0], gl.tokens[0], df, 0);
        scatter_add(grad.embed[0], gl.tokens[0], df, d);
    }
    return loss_value(tr.logit, target, cfg.loss);
}

Vocab build_vocab(const Dataset& data, const std::vector<ColorAssignment>& colorings,
                  const ModelConfig& cfg) {
    (void)cfg;
    Vocab v;
    for (const auto& c : colorings)
        for (const auto& color : c.alphabet) v.add(word_token({color}));
    return v;
}

namespace {

struct Adam {
    Params m, v;
    int step = 0;

    explicit Adam(const Params& like) : m(like.like_zero()), v(like.like_zero()) {}

    void update(Params& p, const Params& g, double lr) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        ++step;
        double c1 = 1.0 - std::pow(b1, step);
        double c2 = 1.0 - std::pow(b2, step);
        auto upd = [&](DenseMatrix& pm, DenseMatrix& mm, DenseMatrix& vm,
                       const DenseMatrix& gm) {
            for (std::size_t i = 0; i < pm.data().size(); ++i) {
                double gi = gm.data()[i];
                mm.data()[i] = b1 * mm.data()[i] + (1.0 - b1) * gi;
                vm.data()[i] = b2 * vm.data()[i] + (1.0 - b2) * gi * gi;
                pm.data()[i] -=
                    lr * (mm.data()[i] / c1) / (std::sqrt(vm.data()[i] / c2) + eps);
            }
        };
        for (std::size_t i = 0; i < p.w.size(); ++i) upd(p.w[i], m.w[i], v.w[i], g.w[i]);
        for (std::size_t i = 0; i < p.embed.size(); ++i)
            upd(p.embed[i], m.embed[i], v.embed[i], g.embed[i]);
    }
};

void add_weight_decay(Params& grad, const Params& p, double wd) {
    if (wd == 0.0) return;
    for (std::size_t i = 0; i < grad.w.size(); ++i)
        for (std::size_t k = 0; k < grad.w[i].data().size(); ++k)
            grad.w[i].data()[k] += wd * p.w[i].data()[k];
}

}  // namespace

TrainResult train(const Dataset& data, const std::vector<ColorAssignment>& colorings,
                  const std::vector<int>& train_idx, const std::vector<int>& val_idx,
                  const ModelConfig& cfg) {
    Vocab vocab = build_vocab(data, colorings, cfg);
    std::vector<GraphLayers> layers;
    layers.reserve(data.graphs.size());
    for (std::size_t i = 0; i < data.graphs.size(); ++i)
        layers.push_back(precompute_layers(data.graphs[i], colorings[i], cfg, vocab));

    Params params = init_params(cfg, vocab, cfg.seed);
    Adam opt(params);
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    TrainResult res;
    Params best = params;
    int stale = 0;

    auto evaluate = [&](const std::vector<int>& idx, double* loss_out) {
        double loss = 0.0;
        int correct = 0;
        for (int i : idx) {
            double o = forward(layers[i], cfg, params);
            loss += loss_value(o, data.targets[i], cfg.loss);
            if ((sigmoid(o) > 0.5 ? 1.0 : 0.0) == data.targets[i]) ++correct;
        }
        if (loss_out) *loss_out = idx.empty() ? 0.0 : loss / idx.size();
        return idx.empty() ? 0.0 : static_cast<double>(correct) / idx.size();
    };

    std::vector<int> order = train_idx;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            Params grad = params.like_zero();
            for (std::size_t k = start; k < end; ++k) {
                int i = order[k];
                if (cfg.dropout > 0.0) {
                    const auto& last_tokens = layers[i].tokens[layers[i].effective_layers - 1];
                    DenseMatrix mask(last_tokens.size(), input_width(cfg));
                    double keep = 1.0 - cfg.dropout;
                    for (double& x : mask.data())
                        x = rng.uniform() < keep ? 1.0 / keep : 0.0;
                    backward(layers[i], cfg, params, data.targets[i], grad, &mask);
                } else {
                    backward(layers[i], cfg, params, data.targets[i], grad);
                }
            }
            double inv = 1.0 / static_cast<double>(end - start);
            for (auto& m : grad.w) m *= inv;
            for (auto& m : grad.embed) m *= inv;
            add_weight_decay(grad, params, cfg.weight_decay);
            grad.clip_global_norm(1.0);
            opt.update(params, grad, cfg.lr);
        }

        EpochStats st;
        st.train_acc = evaluate(train_idx, &st.train_loss);
        st.val_acc = evaluate(val_idx, &st.val_loss);
        res.history.push_back(st);
        if (st.val_acc > res.best_val_acc) {
            res.best_val_acc = st.val_acc;
            res.best_epoch = epoch;
            best = params;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }
    res.params = std::move(best);
    return res;
}

double gcn_reference_forward(const Graph& g, const ModelConfig& cfg, const Params& p,
                             const Vocab& vocab) {
    int n = g.size();
    std::vector<int> ids(n);
    for (int u = 0; u < n; ++u)
        ids[u] = vocab.id(g.has_features() ? g.feature(u) : std::string{});
    DenseMatrix agg = augmented_normalized_adjacency(g);

    DenseMatrix y0 = gather(p.embed[0], ids);
    DenseMatrix h = cfg.combine == CombineMode::concat ? combine(y0, y0, cfg.combine)
                                                       : std::move(y0);
    for (int l = 0; l + 1 < cfg.layers; ++l) {
        DenseMatrix z = relu(agg * h * p.w[l]);
        h = reinjects(cfg) ? combine(z, gather(p.embed[l + 1], ids), cfg.combine)
                           : std::move(z);
    }

    DenseMatrix out = h * p.w.back();
    double mean = 0.0;
    for (std::size_t i = 0; i < out.rows(); ++i) mean += out.at(i, 0);
    return mean / static_cast<double>(n);
}

}  // namespace catagg
