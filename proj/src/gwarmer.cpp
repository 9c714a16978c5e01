#include "gnp/gwarmer.hpp"

#include "gnp/kernels.hpp"

namespace gnp {

AdaptiveWeights init_adaptive_weights(std::size_t walk_steps) {
    const double w = 1.0 / static_cast<double>(walk_steps + 1);
    AdaptiveWeights aw;
    aw.user_weights.assign(walk_steps + 1, w);
    aw.item_weights.assign(walk_steps + 1, w);
    return aw;
}

LayerReps walk_pool(const WalkSet& walks, const EmbeddingStore& embeddings) {
    const std::size_t dim = embeddings.dim;
    LayerReps reps;
    reps.node = walks.origin;
    reps.depth = walks.walk_steps;
    reps.dim = dim;
    reps.vectors = MatD(walks.walk_steps + 1, dim);

    // Layer 0 is the origin embedding, copied rather than averaged so the
    // anchoring holds bitwise.
    {
        auto out = reps.vectors.row(0);
        const auto e = embeddings.embedding(walks.origin);
        for (std::size_t j = 0; j < dim; ++j) out[j] = static_cast<double>(e[j]);
    }

    const double inv_s = 1.0 / static_cast<double>(walks.num_walks);
    std::vector<double> vals(walks.num_walks);
    for (std::size_t k = 1; k <= walks.walk_steps; ++k) {
        auto out = reps.vectors.row(k);
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t s = 0; s < walks.num_walks; ++s) {
                vals[s] = static_cast<double>(embeddings.embedding(walks.at(s, k))[j]);
            }
            out[j] = pairwise_sum(vals) * inv_s;
        }
    }
    return reps;
}

std::vector<double> combine(const LayerReps& reps, std::span<const double> weights) {
    if (weights.size() != reps.depth + 1) throw ConfigError("combine: weight count != layer count");
    std::vector<double> out(reps.dim, 0.0);
    for (std::size_t k = 0; k <= reps.depth; ++k) {
        axpy(weights[k], reps.layer(k), out);
    }
    return out;
}

double warm_score(std::span<const double> user_rep, std::span<const double> item_rep) {
    if (user_rep.size() != item_rep.size()) throw ConfigError("warm_score: dim mismatch");
    return dot(user_rep, item_rep);
}

void warm_score_batch(std::span<const double> user_rep, const MatD& item_reps, std::span<double> out,
                      int n_threads) {
    score_all(item_reps, user_rep, out, n_threads);
}

MatD combine_table(const LayerRepsTable& table, std::span<const double> weights, int n_threads) {
    if (weights.size() != table.depth + 1) throw ConfigError("combine_table: weight count != layer count");
    MatD out(table.n_nodes, table.dim);
    parallel_for(table.n_nodes, n_threads, [&](std::size_t node) {
        auto row = out.row(node);
        for (std::size_t k = 0; k <= table.depth; ++k) {
            axpy_float(weights[k], table.layer(node, k), row);
        }
    });
    return out;
}

} // namespace gnp
