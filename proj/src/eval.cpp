#include "gnp/eval.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <unordered_map>

#include "gnp/kernels.hpp"

namespace gnp {

std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::hybrid: return "hybrid";
        case Protocol::warm: return "warm";
        case Protocol::cold: return "cold";
    }
    return "?";
}

namespace {

std::vector<std::uint8_t> warm_flags(std::size_t n, const std::vector<std::uint32_t>& warm_ids) {
    std::vector<std::uint8_t> flags(n, 0);
    for (std::uint32_t id : warm_ids) flags[id] = 1;
    return flags;
}

// Patched vector per entity: f([warm ? combined : 0 (+) features]).
MatD patch_side(const Mlp& mlp, const MatD& combined, const MatF& features,
                const std::vector<std::uint8_t>& warm, std::size_t rep_dim, int n_threads) {
    if (features.empty()) return {};
    if (mlp.in_dim != rep_dim + features.cols) {
        throw DataError("patch MLP input dim " + std::to_string(mlp.in_dim) + " != rep dim " +
                        std::to_string(rep_dim) + " + feature dim " + std::to_string(features.cols));
    }
    MatD out(features.rows, mlp.out_dim);
    parallel_for(features.rows, n_threads, [&](std::size_t id) {
        std::vector<double> in(mlp.in_dim, 0.0);
        if (warm[id]) {
            const auto rep = combined.row(id);
            std::copy(rep.begin(), rep.end(), in.begin());
        }
        const auto feat = features.row(id);
        for (std::size_t j = 0; j < feat.size(); ++j) in[rep_dim + j] = static_cast<double>(feat[j]);
        const std::vector<double> patched = mlp_forward(mlp, in);
        std::copy(patched.begin(), patched.end(), out.row(id).begin());
    });
    return out;
}

} // namespace

ScoringContext build_scoring_context(const GnpParams& params, const LayerRepsTable& user_reps,
                                     const LayerRepsTable& item_reps, const MatF& user_features,
                                     const MatF& item_features, const std::vector<std::uint32_t>& warm_users,
                                     const std::vector<std::uint32_t>& warm_items, int n_threads) {
    ScoringContext ctx;
    ctx.kind = params.kind;
    ctx.user_warm = warm_flags(user_reps.n_nodes, warm_users);
    ctx.item_warm = warm_flags(item_reps.n_nodes, warm_items);
    ctx.user_combined = combine_table(user_reps, params.adaptive.user_weights, n_threads);
    ctx.item_combined = combine_table(item_reps, params.adaptive.item_weights, n_threads);
    ctx.user_patched =
        patch_side(params.user_mlp, ctx.user_combined, user_features, ctx.user_warm, params.rep_dim, n_threads);
    ctx.item_patched =
        patch_side(params.item_mlp, ctx.item_combined, item_features, ctx.item_warm, params.rep_dim, n_threads);
    return ctx;
}

double dispatch_score(const ScoringContext& ctx, std::uint32_t user, std::uint32_t item) {
    const bool both_warm = ctx.user_warm[user] && ctx.item_warm[item];
    if (ctx.kind == ModelKind::gnp && both_warm) {
        ctx.warm_path_calls.fetch_add(1, std::memory_order_relaxed);
        return dot(ctx.user_combined.row(user), ctx.item_combined.row(item));
    }
    if (ctx.user_patched.empty() || ctx.item_patched.empty()) {
        throw DataError("cannot score entity pair (" + std::to_string(user) + ", " + std::to_string(item) +
                        "): not warm x warm and no auxiliary features loaded");
    }
    ctx.patch_path_calls.fetch_add(1, std::memory_order_relaxed);
    return dot(ctx.user_patched.row(user), ctx.item_patched.row(item));
}

EvalReport evaluate(const DatasetSplit& split, const ScoringContext& ctx, Protocol protocol, int k,
                    int n_threads) {
    const auto t0 = std::chrono::steady_clock::now();
    if (k < 1) throw ConfigError("evaluate: k must be >= 1");

    // The patch path cannot throw from inside the parallel loop, so check
    // its availability here.
    const bool need_patch =
        ctx.kind == ModelKind::dropoutnet || (protocol != Protocol::warm && !split.cold_items.empty());
    if (need_patch && (ctx.user_patched.empty() || ctx.item_patched.empty())) {
        throw DataError("evaluation needs the patched path but no auxiliary features are loaded");
    }

    const std::vector<std::uint32_t>* pool_ids = nullptr;
    std::vector<std::uint32_t> all_items;
    switch (protocol) {
        case Protocol::hybrid:
            all_items.resize(split.n_items);
            std::iota(all_items.begin(), all_items.end(), 0u);
            pool_ids = &all_items;
            break;
        case Protocol::warm: pool_ids = &split.warm_items; break;
        case Protocol::cold: pool_ids = &split.cold_items; break;
    }
    std::vector<std::uint8_t> in_pool(split.n_items, 0);
    for (std::uint32_t id : *pool_ids) in_pool[id] = 1;

    // Per-user relevant test items (restricted to the pool) and ranking
    // exclusions (training and validation positives).
    std::unordered_map<std::uint32_t, std::unordered_set<std::uint32_t>> relevant, excluded;
    for (const Interaction& r : split.test) {
        if (in_pool[r.item]) relevant[r.user].insert(r.item);
    }
    for (const auto* part : {&split.embed_train, &split.model_train, &split.validation}) {
        for (const Interaction& r : *part) excluded[r.user].insert(r.item);
    }

    std::vector<std::uint32_t> users;
    users.reserve(relevant.size());
    for (const auto& [u, items] : relevant) users.push_back(u);
    std::sort(users.begin(), users.end());

    struct PerUser {
        RankingMetrics m;
        double auc = 0.0;
        bool has_auc = false;
        bool evaluated = false;
    };
    std::vector<PerUser> results(users.size());
    static const std::unordered_set<std::uint32_t> kNoExclusions;

    parallel_for(users.size(), n_threads, [&](std::size_t idx) {
        const std::uint32_t u = users[idx];
        const auto& rel = relevant.at(u);
        const auto ex_it = excluded.find(u);
        const auto& ex = ex_it == excluded.end() ? kNoExclusions : ex_it->second;
        std::vector<std::pair<double, int>> scored;
        scored.reserve(pool_ids->size());
        std::vector<std::pair<double, std::uint32_t>> candidates;
        candidates.reserve(pool_ids->size());
        for (std::uint32_t item : *pool_ids) {
            if (ex.count(item)) continue;
            const double s = dispatch_score(ctx, u, item);
            candidates.emplace_back(s, item);
            scored.emplace_back(s, rel.count(item) ? 1 : 0);
        }
        if (candidates.size() <= rel.size()) return; // no negatives in pool; skip user
        std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::uint32_t> ranked(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) ranked[i] = candidates[i].second;
        PerUser& r = results[idx];
        r.m = recall_precision_ndcg_at_k(ranked, rel, k);
        r.auc = auc(scored);
        r.has_auc = true;
        r.evaluated = true;
    });

    EvalReport report;
    report.protocol = protocol;
    report.k = k;
    double sum_recall = 0, sum_precision = 0, sum_ndcg = 0, sum_auc = 0;
    std::size_t n_eval = 0, n_auc = 0;
    for (const PerUser& r : results) {
        if (!r.evaluated) continue;
        ++n_eval;
        sum_recall += r.m.recall;
        sum_precision += r.m.precision;
        sum_ndcg += r.m.ndcg;
        if (r.has_auc) {
            ++n_auc;
            sum_auc += r.auc;
        }
    }
    report.n_users_evaluated = n_eval;
    if (n_eval > 0) {
        report.recall = sum_recall / static_cast<double>(n_eval);
        report.precision = sum_precision / static_cast<double>(n_eval);
        report.ndcg = sum_ndcg / static_cast<double>(n_eval);
    }
    if (n_auc > 0) report.auc = sum_auc / static_cast<double>(n_auc);
    report.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void print_report_tsv(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << "protocol\tk\trecall\tprecision\tndcg\tauc\tn_users_evaluated\twall_time_ms\n";
    for (const EvalReport& r : reports) {
        out << protocol_name(r.protocol) << '\t' << r.k << '\t' << r.recall << '\t' << r.precision << '\t'
            << r.ndcg << '\t' << r.auc << '\t' << r.n_users_evaluated << '\t' << r.wall_time_ms << '\n';
    }
}

void print_report_table(std::ostream& out, const std::vector<EvalReport>& reports) {
    out << std::left << std::setw(9) << "protocol" << std::right << std::setw(5) << "k" << std::setw(10)
        << "recall" << std::setw(11) << "precision" << std::setw(10) << "ndcg" << std::setw(10) << "auc"
        << std::setw(8) << "users" << std::setw(9) << "ms" << '\n';
    for (const EvalReport& r : reports) {
        out << std::left << std::setw(9) << protocol_name(r.protocol) << std::right << std::setw(5) << r.k
            << std::fixed << std::setprecision(4) << std::setw(10) << r.recall << std::setw(11) << r.precision
            << std::setw(10) << r.ndcg << std::setw(10) << r.auc << std::setw(8) << r.n_users_evaluated
            << std::setw(9) << r.wall_time_ms << '\n';
        out.unsetf(std::ios::fixed);
    }
}

// ---- inference benchmark -------------------------------------------------

BenchContext make_synthetic_bench(std::size_t n_users, std::size_t n_items, std::size_t dim,
                                  std::size_t feat_dim, std::size_t hidden_dim, int mlp_depth,
                                  std::uint64_t seed) {
    Rng rng(seed);
    BenchContext ctx;
    ctx.user_combined = MatD(n_users, dim);
    ctx.item_combined = MatD(n_items, dim);
    for (double& v : ctx.user_combined.data) v = rng.uniform(-1.0, 1.0);
    for (double& v : ctx.item_combined.data) v = rng.uniform(-1.0, 1.0);
    ctx.user_raw = MatF(n_users, dim);
    ctx.item_raw = MatF(n_items, dim);
    for (float& v : ctx.user_raw.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (float& v : ctx.item_raw.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    ctx.user_features = MatF(n_users, feat_dim);
    ctx.item_features = MatF(n_items, feat_dim);
    for (float& v : ctx.user_features.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (float& v : ctx.item_features.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    ctx.user_mlp = make_mlp(dim + feat_dim, hidden_dim, dim, mlp_depth, rng);
    ctx.item_mlp = make_mlp(dim + feat_dim, hidden_dim, dim, mlp_depth, rng);
    return ctx;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Tower outputs for every row of raw (+) features.
MatD run_towers(const Mlp& mlp, const MatF& raw, const MatF& features, int n_threads) {
    MatD out(raw.rows, mlp.out_dim);
    parallel_for(raw.rows, n_threads, [&](std::size_t id) {
        std::vector<double> in(mlp.in_dim);
        const auto r = raw.row(id);
        const auto f = features.row(id);
        for (std::size_t j = 0; j < r.size(); ++j) in[j] = static_cast<double>(r[j]);
        for (std::size_t j = 0; j < f.size(); ++j) in[r.size() + j] = static_cast<double>(f[j]);
        const std::vector<double> o = mlp_forward(mlp, in);
        std::copy(o.begin(), o.end(), out.row(id).begin());
    });
    return out;
}

double score_sweep(const MatD& users, const MatD& items, std::size_t n_users, int n_threads) {
    double checksum = 0.0;
    std::vector<double> out(items.rows);
    for (std::size_t u = 0; u < n_users; ++u) {
        score_all(items, users.row(u), out, n_threads);
        checksum += out[u % out.size()];
    }
    return checksum;
}

} // namespace

BenchReport bench_inference(const BenchContext& ctx, std::size_t n_users, int repeat, int n_threads) {
    using clock = std::chrono::steady_clock;
    BenchReport report;
    report.n_users = std::min(n_users, ctx.user_combined.rows);
    report.n_items = ctx.item_combined.rows;
    report.repeat = repeat;

    for (int r = 0; r < repeat; ++r) {
        // Warm path: representations are precomputed, scoring is dot products.
        auto t0 = clock::now();
        report.checksum += score_sweep(ctx.user_combined, ctx.item_combined, report.n_users, n_threads);
        auto t1 = clock::now();
        report.warm_path_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

        // Baseline path: tower MLPs generate the representations first, then
        // the same scoring runs.
        t0 = clock::now();
        MatD users = run_towers(ctx.user_mlp, ctx.user_raw, ctx.user_features, n_threads);
        MatD items = run_towers(ctx.item_mlp, ctx.item_raw, ctx.item_features, n_threads);
        report.checksum += score_sweep(users, items, report.n_users, n_threads);
        t1 = clock::now();
        report.mlp_path_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    report.warm_median_ms = median(report.warm_path_ms);
    report.mlp_median_ms = median(report.mlp_path_ms);
    return report;
}

} // namespace gnp
