#pragma once

#include <vector>

#include "gnp/common.hpp"
#include "gnp/embedding.hpp"
#include "gnp/graph.hpp"
#include "gnp/reps.hpp"

namespace gnp {

// Learned per-layer mixing weights, one vector per side (global across
// entities, not per-node).
struct AdaptiveWeights {
    std::vector<double> user_weights; // K+1
    std::vector<double> item_weights; // K+1
};

// Uniform layer averaging: every weight 1/(K+1).
AdaptiveWeights init_adaptive_weights(std::size_t walk_steps);

// Mean pooling of a walk set: layer k is the mean embedding of the step-k
// nodes across walks (order-stable pairwise summation); layer 0 is pinned to
// the origin embedding.
LayerReps walk_pool(const WalkSet& walks, const EmbeddingStore& embeddings);

// Weighted sum of layer vectors into one representation.
std::vector<double> combine(const LayerReps& reps, std::span<const double> weights);

double warm_score(std::span<const double> user_rep, std::span<const double> item_rep);

// out[i] = warm_score(user_rep, item_reps.row(i)) for every row.
void warm_score_batch(std::span<const double> user_rep, const MatD& item_reps, std::span<double> out,
                      int n_threads = 1);

// Combined representation for every node of a table: row = sum_k w[k] * layer_k.
MatD combine_table(const LayerRepsTable& table, std::span<const double> weights, int n_threads = 1);

} // namespace gnp
