#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catagg/efficient.hpp"

namespace catagg {

enum class CombineMode { add, concat, none };  // none = no feature reinjection
enum class LossKind { bce, mse };

struct ModelConfig {
    int layers = 2;  // total weight matrices, >= 2
    int width = 8;
    CombineMode combine = CombineMode::add;
    LossKind loss = LossKind::bce;
    double dropout = 0.0;  // applied before the readout layer while training
    double lr = 1e-2;
    double weight_decay = 0.0;
    int epochs = 200;
    int patience = 20;
    int batch_size = 32;
    std::uint64_t seed = 1;
};

/// Token vocabulary shared by all embedding tables. Index 0 is the
/// fallback for tokens unseen at vocabulary-build time (and for λ).
struct Vocab {
    std::vector<std::string> tokens{"∅"};
    std::map<std::string, int> index{{"∅", 0}};

    int id(const std::string& t) const {
        auto it = index.find(t);
        return it == index.end() ? 0 : it->second;
    }
    void add(const std::string& t) {
        if (!index.count(t)) {
            index[t] = static_cast<int>(tokens.size());
            tokens.push_back(t);
        }
    }
    std::size_t size() const { return tokens.size(); }
};

/// The word-level feature token: the feature component of a word's last
/// color (its base color for uncombined colorings), "∅" for λ.
std::string word_token(const Word& w);

struct Params {
    std::vector<DenseMatrix> w;      // layers matrices; last one maps to a scalar
    std::vector<DenseMatrix> embed;  // layers tables, vocab × width

    void zero();
    Params like_zero() const;
    double clip_global_norm(double max_norm);
};

Params init_params(const ModelConfig& cfg, const Vocab& vocab, std::uint64_t seed);

/// Per-graph precomputation: the float aggregation chain (deep level
/// first, the exact 1×|S_1| readout row last) and per-level token ids.
struct GraphLayers {
    int effective_layers = 0;             // min(config.layers, basis depth used)
    std::vector<DenseMatrix> chain;       // effective_layers matrices
    std::vector<std::vector<int>> tokens; // tokens[l] for the input of chain[l]
};

GraphLayers precompute_layers(const Graph& g, const ColorAssignment& c,
                              const ModelConfig& cfg, const Vocab& vocab);

/// Forward pass; returns the raw logit. `dropout_mask` (same shape as the
/// readout input) is applied when non-null.
double forward(const GraphLayers& gl, const ModelConfig& cfg, const Params& p,
               const DenseMatrix* dropout_mask = nullptr);

double loss_value(double logit, double target, LossKind loss);

/// Forward + backward for one example; accumulates into `grad` and
/// returns the loss.
double backward(const GraphLayers& gl, const ModelConfig& cfg, const Params& p,
                double target, Params& grad, const DenseMatrix* dropout_mask = nullptr);

struct EpochStats {
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

struct TrainResult {
    Params params;
    std::vector<EpochStats> history;
    double best_val_acc = 0.0;
    int best_epoch = -1;
};

/// Full training loop: Adam, global-norm gradient clipping at 1.0, early
/// stopping on validation accuracy. `colorings` must be index-aligned
/// with `data.graphs`; targets are 0/1.
TrainResult train(const Dataset& data, const std::vector<ColorAssignment>& colorings,
                  const std::vector<int>& train_idx, const std::vector<int>& val_idx,
                  const ModelConfig& cfg);

Vocab build_vocab(const Dataset& data, const std::vector<ColorAssignment>& colorings,
                  const ModelConfig& cfg);

/// Plain vertex-space GCN with the same weights: H0 = token embeddings,
/// H(l+1) = combine(relu(Ã H(l) W(l)), H0), readout = mean row through the
/// final weight matrix. With per-vertex colors the aggregation chain
/// reduces to this network exactly.
double gcn_reference_forward(const Graph& g, const ModelConfig& cfg, const Params& p,
                             const Vocab& vocab);

}  // namespace catagg
