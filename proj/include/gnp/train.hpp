#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/params.hpp"
#include "gnp/reps.hpp"
#include "gnp/split.hpp"

namespace gnp {

struct TrainPair {
    std::uint32_t user = 0;
    std::uint32_t item = 0;
    double label = 0.0;
};

// Per-pair mask draws (user side, item side), Bernoulli(tau) each.
struct MaskPair {
    bool user_masked = false;
    bool item_masked = false;
};

std::vector<MaskPair> draw_masks(std::size_t n, double tau, Rng& rng);

struct TrainConfig {
    double lr = 1e-3;
    int batch_size = 1024; // positives per batch; negatives are appended
    double l2 = 1e-5;
    double tau = 0.5;
    int n_neg_per_pos = 4;
    int max_epochs = 100;
    int patience = 10;
    std::uint64_t seed = 0;
    std::size_t hidden_dim = 200;
    int mlp_depth = 2;
    ModelKind model = ModelKind::gnp;
    bool early_stop_warm_only = false; // default: hybrid validation AUC
    int n_threads = 1;
};

struct LossStats {
    double loss = 0.0;
    // Largest adaptive-weight gradient contribution arriving through the
    // patched term; identically zero when every mask fired (tau = 1).
    double patch_adaptive_grad_absmax = 0.0;
};

// Two-term squared-error objective over one batch, with exact reverse-mode
// gradients accumulated into `grads` (zeroed first). The patched term
// consumes the masked combined representations, so its gradients flow back
// into the adaptive weights exactly when the mask did not fire. Adds the
// l2 * ||params||^2 penalty and its gradient. Throws NumericError on a
// non-finite loss.
LossStats gnp_loss_masked(std::span<const TrainPair> batch, const GnpParams& params,
                          const LayerRepsTable& user_reps, const LayerRepsTable& item_reps,
                          const MatF& user_features, const MatF& item_features, double l2,
                          std::span<const MaskPair> masks, GnpParams& grads, int n_threads = 1);

// Convenience wrapper drawing the masks from `rng` (Bernoulli(tau) per side).
LossStats gnp_loss(std::span<const TrainPair> batch, const GnpParams& params,
                   const LayerRepsTable& user_reps, const LayerRepsTable& item_reps,
                   const MatF& user_features, const MatF& item_features, double l2, double tau, Rng& rng,
                   GnpParams& grads, int n_threads = 1);

// ---- Adam ------------------------------------------------------------------

struct AdamState {
    GnpParams first_moment;
    GnpParams second_moment;
    long step = 0;
};

AdamState init_adam_state(const GnpParams& params);

// Single-tensor Adam update with bias correction (exposed for tests).
void adam_update_tensor(std::span<double> values, std::span<const double> grads, std::span<double> m,
                        std::span<double> v, long step, double lr, double beta1, double beta2, double eps);

void adam_step(GnpParams& params, const GnpParams& grads, AdamState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

// ---- training loop ---------------------------------------------------------

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double val_auc = 0.0;
    std::int64_t elapsed_ms = 0;
    double patch_adaptive_grad_absmax = 0.0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    int best_epoch = 0;
    double best_auc = 0.0;
};

void write_train_log(const std::string& path, const TrainLog& log);

struct FitInputs {
    const DatasetSplit& split;
    const LayerRepsTable& user_reps; // dropoutnet: depth-0 raw-embedding tables
    const LayerRepsTable& item_reps;
    const MatF& user_features;
    const MatF& item_features;
};

// Mini-batch training over the model_train positives plus sampled warm-pool
// negatives, with per-epoch hybrid validation AUC and early stopping: stop
// once the AUC has not improved for `patience` consecutive epochs and return
// the best-AUC checkpoint.
GnpParams fit(const FitInputs& inputs, const TrainConfig& cfg, TrainLog* log = nullptr);

} // namespace gnp
