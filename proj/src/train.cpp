#include "gnp/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "gnp/eval.hpp"
#include "gnp/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gnp {

std::vector<MaskPair> draw_masks(std::size_t n, double tau, Rng& rng) {
    if (tau < 0.0 || tau > 1.0) throw ConfigError("tau must be in [0,1]");
    std::vector<MaskPair> masks(n);
    for (MaskPair& m : masks) {
        m.user_masked = rng.bernoulli(tau);
        m.item_masked = rng.bernoulli(tau);
    }
    return masks;
}

namespace {

void zero_grads(GnpParams& grads) {
    for (auto t : param_tensors(grads)) {
        std::fill(t.begin(), t.end(), 0.0);
    }
}

void add_params(GnpParams& dst, const GnpParams& src) {
    auto d = param_tensors(dst);
    auto s = param_tensors(src);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d[i].size(); ++j) d[i][j] += s[i][j];
    }
}

// Combined representation of one table row under the given layer weights.
void combine_row(const LayerRepsTable& reps, std::uint32_t id, std::span<const double> weights,
                 std::vector<double>& out) {
    out.assign(reps.dim, 0.0);
    for (std::size_t k = 0; k <= reps.depth; ++k) {
        axpy_float(weights[k], reps.layer(id, k), out);
    }
}

struct ExampleScratch {
    std::vector<double> xu, xi, in_u, in_i, up_u, up_i;
    MlpWorkspace ws_u, ws_i;
};

// Gradient and loss contribution of a single (user, item, label) example.
void accumulate_example(const TrainPair& ex, const MaskPair& msk, const GnpParams& params,
                        const LayerRepsTable& user_reps, const LayerRepsTable& item_reps,
                        const MatF& user_features, const MatF& item_features, GnpParams& gbuf,
                        double& loss, double& patch_absmax, ExampleScratch& s) {
    const std::size_t d = params.rep_dim;
    const bool gnp_kind = params.kind == ModelKind::gnp;
    combine_row(user_reps, ex.user, params.adaptive.user_weights, s.xu);
    combine_row(item_reps, ex.item, params.adaptive.item_weights, s.xi);

    if (gnp_kind) {
        const double warm_err = dot(s.xu, s.xi) - ex.label;
        loss += warm_err * warm_err;
        const double g = 2.0 * warm_err;
        for (std::size_t k = 0; k <= user_reps.depth; ++k) {
            gbuf.adaptive.user_weights[k] += g * dot_fd(user_reps.layer(ex.user, k), s.xi);
            gbuf.adaptive.item_weights[k] += g * dot_fd(item_reps.layer(ex.item, k), s.xu);
        }
    }

    // Patched term over the masked representations.
    const auto fu_feat = user_features.row(ex.user);
    const auto fi_feat = item_features.row(ex.item);
    s.in_u.assign(params.user_mlp.in_dim, 0.0);
    s.in_i.assign(params.item_mlp.in_dim, 0.0);
    if (!msk.user_masked) std::copy(s.xu.begin(), s.xu.end(), s.in_u.begin());
    if (!msk.item_masked) std::copy(s.xi.begin(), s.xi.end(), s.in_i.begin());
    for (std::size_t j = 0; j < fu_feat.size(); ++j) s.in_u[d + j] = static_cast<double>(fu_feat[j]);
    for (std::size_t j = 0; j < fi_feat.size(); ++j) s.in_i[d + j] = static_cast<double>(fi_feat[j]);

    mlp_forward(params.user_mlp, s.in_u, s.ws_u);
    mlp_forward(params.item_mlp, s.in_i, s.ws_i);
    const std::vector<double>& fu = s.ws_u.activations.back();
    const std::vector<double>& fi = s.ws_i.activations.back();
    const double cold_err = dot(fu, fi) - ex.label;
    loss += cold_err * cold_err;

    const double g = 2.0 * cold_err;
    s.up_u.assign(fu.size(), 0.0);
    s.up_i.assign(fi.size(), 0.0);
    for (std::size_t j = 0; j < fu.size(); ++j) {
        s.up_u[j] = g * fi[j];
        s.up_i[j] = g * fu[j];
    }
    const std::vector<double> gin_u = mlp_backward(params.user_mlp, s.ws_u, s.up_u, gbuf.user_mlp);
    const std::vector<double> gin_i = mlp_backward(params.item_mlp, s.ws_i, s.up_i, gbuf.item_mlp);

    // Through the unmasked representation the patched term reaches the
    // adaptive weights; a fired mask blocks the path entirely.
    if (gnp_kind && !msk.user_masked) {
        const std::span<const double> rep_grad(gin_u.data(), d);
        for (std::size_t k = 0; k <= user_reps.depth; ++k) {
            const double contrib = dot_fd(user_reps.layer(ex.user, k), rep_grad);
            gbuf.adaptive.user_weights[k] += contrib;
            patch_absmax = std::max(patch_absmax, std::abs(contrib));
        }
    }
    if (gnp_kind && !msk.item_masked) {
        const std::span<const double> rep_grad(gin_i.data(), d);
        for (std::size_t k = 0; k <= item_reps.depth; ++k) {
            const double contrib = dot_fd(item_reps.layer(ex.item, k), rep_grad);
            gbuf.adaptive.item_weights[k] += contrib;
            patch_absmax = std::max(patch_absmax, std::abs(contrib));
        }
    }
}

} // namespace

LossStats gnp_loss_masked(std::span<const TrainPair> batch, const GnpParams& params,
                          const LayerRepsTable& user_reps, const LayerRepsTable& item_reps,
                          const MatF& user_features, const MatF& item_features, double l2,
                          std::span<const MaskPair> masks, GnpParams& grads, int n_threads) {
    if (masks.size() != batch.size()) throw ConfigError("gnp_loss: one mask pair per example required");
    zero_grads(grads);
    LossStats stats;

    const int nt = batch.size() > 1 ? resolve_threads(n_threads) : 1;
#ifdef _OPENMP
    if (nt > 1) {
        std::vector<GnpParams> buffers;
        buffers.reserve(nt);
        for (int t = 0; t < nt; ++t) buffers.push_back(zeros_like(params));
        std::vector<double> losses(nt, 0.0), absmax(nt, 0.0);
#pragma omp parallel num_threads(nt)
        {
            const int tid = omp_get_thread_num();
            ExampleScratch scratch;
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch.size()); ++i) {
                accumulate_example(batch[i], masks[i], params, user_reps, item_reps, user_features,
                                   item_features, buffers[tid], losses[tid], absmax[tid], scratch);
            }
        }
        // Fixed reduction order (thread id) keeps results reproducible for a
        // given thread count.
        for (int t = 0; t < nt; ++t) {
            add_params(grads, buffers[t]);
            stats.loss += losses[t];
            stats.patch_adaptive_grad_absmax = std::max(stats.patch_adaptive_grad_absmax, absmax[t]);
        }
    } else
#endif
    {
        ExampleScratch scratch;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            accumulate_example(batch[i], masks[i], params, user_reps, item_reps, user_features,
                               item_features, grads, stats.loss, stats.patch_adaptive_grad_absmax, scratch);
        }
    }

    // l2 penalty over every trainable tensor.
    if (l2 != 0.0) {
        auto ps = param_tensors(params);
        auto gs = param_tensors(grads);
        double sq = 0.0;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            for (std::size_t j = 0; j < ps[i].size(); ++j) {
                sq += ps[i][j] * ps[i][j];
                gs[i][j] += 2.0 * l2 * ps[i][j];
            }
        }
        stats.loss += l2 * sq;
    }

    if (!std::isfinite(stats.loss)) {
        throw NumericError("non-finite training loss (learning rate too high?)");
    }
    return stats;
}

LossStats gnp_loss(std::span<const TrainPair> batch, const GnpParams& params,
                   const LayerRepsTable& user_reps, const LayerRepsTable& item_reps,
                   const MatF& user_features, const MatF& item_features, double l2, double tau, Rng& rng,
                   GnpParams& grads, int n_threads) {
    const std::vector<MaskPair> masks = draw_masks(batch.size(), tau, rng);
    return gnp_loss_masked(batch, params, user_reps, item_reps, user_features, item_features, l2, masks,
                           grads, n_threads);
}

// ---- Adam ------------------------------------------------------------------

AdamState init_adam_state(const GnpParams& params) {
    AdamState st;
    st.first_moment = zeros_like(params);
    st.second_moment = zeros_like(params);
    st.step = 0;
    return st;
}

void adam_update_tensor(std::span<double> values, std::span<const double> grads, std::span<double> m,
                        std::span<double> v, long step, double lr, double beta1, double beta2, double eps) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t j = 0; j < values.size(); ++j) {
        m[j] = beta1 * m[j] + (1.0 - beta1) * grads[j];
        v[j] = beta2 * v[j] + (1.0 - beta2) * grads[j] * grads[j];
        const double m_hat = m[j] / bc1;
        const double v_hat = v[j] / bc2;
        values[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

void adam_step(GnpParams& params, const GnpParams& grads, AdamState& state, double lr, double beta1,
               double beta2, double eps) {
    ++state.step;
    auto ps = param_tensors(params);
    auto gs = param_tensors(grads);
    auto ms = param_tensors(state.first_moment);
    auto vs = param_tensors(state.second_moment);
    if (ps.size() != gs.size()) throw ConfigError("adam_step: parameter/gradient shape mismatch");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        adam_update_tensor(ps[i], gs[i], ms[i], vs[i], state.step, lr, beta1, beta2, eps);
    }
}

// ---- training loop ---------------------------------------------------------

void write_train_log(const std::string& path, const TrainLog& log) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "epoch\tloss\tval_auc\telapsed_ms\n";
    out.precision(10);
    for (const EpochLog& e : log.epochs) {
        out << e.epoch << '\t' << e.loss << '\t' << e.val_auc << '\t' << e.elapsed_ms << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

namespace {

struct ValPair {
    std::uint32_t user;
    std::uint32_t item;
    int label;
};

std::vector<ValPair> build_validation_pairs(const DatasetSplit& split, bool warm_only, std::uint64_t seed) {
    std::unordered_set<std::uint64_t> observed;
    for (const auto* part : {&split.embed_train, &split.model_train, &split.validation, &split.test}) {
        for (const Interaction& r : *part) {
            observed.insert((static_cast<std::uint64_t>(r.user) << 32) | r.item);
        }
    }
    std::vector<std::uint32_t> pool;
    if (warm_only) {
        pool = split.warm_items;
    } else {
        pool.resize(split.n_items);
        std::iota(pool.begin(), pool.end(), 0u);
    }
    Rng rng(seed);
    std::vector<ValPair> pairs;
    constexpr int kMaxRetries = 32;
    for (const Interaction& r : split.validation) {
        if (warm_only && !id_in(split.warm_items, r.item)) continue;
        pairs.push_back({r.user, r.item, 1});
        std::uint32_t j = pool[rng.uniform_index(pool.size())];
        for (int t = 0; t < kMaxRetries && observed.count((static_cast<std::uint64_t>(r.user) << 32) | j);
             ++t) {
            j = pool[rng.uniform_index(pool.size())];
        }
        pairs.push_back({r.user, j, 0});
    }
    return pairs;
}

double validation_auc(const std::vector<ValPair>& pairs, const GnpParams& params, const FitInputs& in,
                      int n_threads) {
    if (pairs.empty()) return 0.5;
    const ScoringContext ctx =
        build_scoring_context(params, in.user_reps, in.item_reps, in.user_features, in.item_features,
                              in.split.warm_users, in.split.warm_items, n_threads);
    std::vector<std::pair<double, int>> scored(pairs.size());
    parallel_for(pairs.size(), n_threads, [&](std::size_t i) {
        scored[i] = {dispatch_score(ctx, pairs[i].user, pairs[i].item), pairs[i].label};
    });
    return auc(scored);
}

} // namespace

GnpParams fit(const FitInputs& in, const TrainConfig& cfg, TrainLog* log) {
    if (cfg.lr < 0.0) throw ConfigError("lr must be >= 0");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (cfg.tau < 0.0 || cfg.tau > 1.0) throw ConfigError("tau must be in [0,1]");
    if (cfg.patience < 1) throw ConfigError("patience must be >= 1");
    if (in.user_features.rows == 0 || in.item_features.rows == 0) {
        throw DataError("training the patched scorer requires user and item features");
    }

    GnpParams params = init_gnp_params(cfg.model, in.user_reps.depth, in.user_reps.dim,
                                       in.user_features.cols, in.item_features.cols, cfg.hidden_dim,
                                       cfg.mlp_depth, derive_seed(cfg.seed, "params"));
    TrainLog local_log;
    TrainLog& tl = log ? *log : local_log;
    tl.epochs.clear();
    tl.best_epoch = 0;
    tl.best_auc = 0.0;
    if (cfg.max_epochs == 0) return params;

    const std::vector<Interaction>& positives = in.split.model_train;
    if (positives.empty()) throw DataError("empty model-training partition");
    if (in.split.warm_items.empty()) throw DataError("no warm items to sample negatives from");

    std::vector<Interaction> observed = in.split.embed_train;
    observed.insert(observed.end(), in.split.model_train.begin(), in.split.model_train.end());

    const std::vector<ValPair> val_pairs =
        build_validation_pairs(in.split, cfg.early_stop_warm_only, derive_seed(cfg.seed, "val-neg"));

    AdamState adam = init_adam_state(params);
    GnpParams grads = zeros_like(params);
    GnpParams best = params;
    double best_auc = -1.0;
    int bad_epochs = 0;

    std::vector<std::uint32_t> order(positives.size());
    std::iota(order.begin(), order.end(), 0u);

    std::vector<TrainPair> batch;
    std::vector<Interaction> batch_pos;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng epoch_rng(derive_seed(cfg.seed, "epoch", static_cast<std::uint64_t>(epoch)));
        epoch_rng.shuffle(order);

        double epoch_loss = 0.0;
        double epoch_absmax = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            batch_pos.clear();
            for (std::size_t i = start; i < stop; ++i) batch_pos.push_back(positives[order[i]]);
            const std::vector<Interaction> negs =
                sample_negatives(batch_pos, cfg.n_neg_per_pos, in.split.warm_items, epoch_rng, observed);
            batch.clear();
            for (const Interaction& r : batch_pos) batch.push_back({r.user, r.item, 1.0});
            for (const Interaction& r : negs) batch.push_back({r.user, r.item, 0.0});
            const std::vector<MaskPair> masks = draw_masks(batch.size(), cfg.tau, epoch_rng);
            const LossStats stats = gnp_loss_masked(batch, params, in.user_reps, in.item_reps,
                                                    in.user_features, in.item_features, cfg.l2, masks, grads,
                                                    cfg.n_threads);
            adam_step(params, grads, adam, cfg.lr);
            epoch_loss += stats.loss;
            epoch_absmax = std::max(epoch_absmax, stats.patch_adaptive_grad_absmax);
        }
        if (!all_finite(params)) {
            throw NumericError("non-finite parameter after epoch " + std::to_string(epoch));
        }

        const double val_auc = validation_auc(val_pairs, params, in, cfg.n_threads);
        EpochLog el;
        el.epoch = epoch;
        el.loss = epoch_loss;
        el.val_auc = val_auc;
        el.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        el.patch_adaptive_grad_absmax = epoch_absmax;
        tl.epochs.push_back(el);

        if (val_auc > best_auc) {
            best_auc = val_auc;
            best = params;
            tl.best_epoch = epoch;
            tl.best_auc = val_auc;
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (bad_epochs >= cfg.patience) break;
        }
    }
    return best;
}

} // namespace gnp
