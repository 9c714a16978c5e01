#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "gnp/metrics.hpp"
#include "gnp/params.hpp"
#include "gnp/reps.hpp"
#include "gnp/split.hpp"

namespace gnp {

enum class Protocol { hybrid, warm, cold };

std::string protocol_name(Protocol p);

struct EvalReport {
    Protocol protocol = Protocol::hybrid;
    int k = 20;
    double recall = 0.0;
    double precision = 0.0;
    double ndcg = 0.0;
    double auc = 0.0;
    std::size_t n_users_evaluated = 0;
    std::int64_t wall_time_ms = 0;
};

// Per-entity score vectors materialized from one parameter set. Warm
// entities carry their combined representation; every entity with features
// carries its patched representation (zero placeholder on the rep slot for
// cold entities, the unmasked representation for warm ones).
struct ScoringContext {
    ModelKind kind = ModelKind::gnp;
    MatD user_combined; // n_users x d (gnp warm path)
    MatD item_combined;
    MatD user_patched; // n_users x d, empty when features unavailable
    MatD item_patched;
    std::vector<std::uint8_t> user_warm;
    std::vector<std::uint8_t> item_warm;
    mutable std::atomic<std::uint64_t> warm_path_calls{0};
    mutable std::atomic<std::uint64_t> patch_path_calls{0};

    ScoringContext() = default;
    ScoringContext(const ScoringContext&) = delete;
    ScoringContext& operator=(const ScoringContext&) = delete;
    ScoringContext(ScoringContext&& other) noexcept
        : kind(other.kind),
          user_combined(std::move(other.user_combined)),
          item_combined(std::move(other.item_combined)),
          user_patched(std::move(other.user_patched)),
          item_patched(std::move(other.item_patched)),
          user_warm(std::move(other.user_warm)),
          item_warm(std::move(other.item_warm)),
          warm_path_calls(other.warm_path_calls.load()),
          patch_path_calls(other.patch_path_calls.load()) {}
    ScoringContext& operator=(ScoringContext&&) = delete;

    void reset_counters() const {
        warm_path_calls = 0;
        patch_path_calls = 0;
    }
};

// Empty feature matrices are allowed; scoring then fails loudly if the patch
// path is ever needed.
ScoringContext build_scoring_context(const GnpParams& params, const LayerRepsTable& user_reps,
                                     const LayerRepsTable& item_reps, const MatF& user_features,
                                     const MatF& item_features, const std::vector<std::uint32_t>& warm_users,
                                     const std::vector<std::uint32_t>& warm_items, int n_threads = 1);

// The relevance dispatch: warm x warm pairs take the warm inner-product
// path, every other combination the patched path (dropoutnet contexts always
// take the patched path).
double dispatch_score(const ScoringContext& ctx, std::uint32_t user, std::uint32_t item);

EvalReport evaluate(const DatasetSplit& split, const ScoringContext& ctx, Protocol protocol, int k,
                    int n_threads = 1);

void print_report_tsv(std::ostream& out, const std::vector<EvalReport>& reports);
void print_report_table(std::ostream& out, const std::vector<EvalReport>& reports);

// ---- inference benchmark -------------------------------------------------

// Inputs for the two inference paths: precomputed-representation scoring
// (warm path) versus tower-MLP embedding generation followed by the same
// scoring (the hybrid-model baseline path).
struct BenchContext {
    MatD user_combined; // n_users x d
    MatD item_combined; // n_items x d
    MatF user_raw;      // raw embeddings fed to the towers
    MatF item_raw;
    MatF user_features;
    MatF item_features;
    Mlp user_mlp;
    Mlp item_mlp;
};

BenchContext make_synthetic_bench(std::size_t n_users, std::size_t n_items, std::size_t dim,
                                  std::size_t feat_dim, std::size_t hidden_dim, int mlp_depth,
                                  std::uint64_t seed);

struct BenchReport {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    int repeat = 0;
    std::vector<double> warm_path_ms; // one sample per repeat
    std::vector<double> mlp_path_ms;
    double warm_median_ms = 0.0;
    double mlp_median_ms = 0.0;
    double checksum = 0.0; // keeps the scoring loops observable
};

BenchReport bench_inference(const BenchContext& ctx, std::size_t n_users, int repeat, int n_threads = 1);

} // namespace gnp
