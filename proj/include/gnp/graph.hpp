#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/common.hpp"
#include "gnp/embedding.hpp"
#include "gnp/interactions.hpp"
#include "gnp/reps.hpp"
#include "gnp/rng.hpp"

namespace gnp {

// Bipartite interaction graph with sorted, duplicate-free adjacency on both
// sides: i in user_adj[u] <=> u in item_adj[i].
struct InteractionGraph {
    std::vector<std::vector<std::uint32_t>> user_adj;
    std::vector<std::vector<std::uint32_t>> item_adj;
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;

    std::size_t degree(NodeRef node) const {
        return node.side == NodeSide::user ? user_adj[node.id].size() : item_adj[node.id].size();
    }
};

// S random walks of K steps each, all starting at `origin`. Walks alternate
// sides; a degree-0 node self-loops for the remaining steps.
struct WalkSet {
    NodeRef origin;
    std::size_t num_walks = 0;  // S
    std::size_t walk_steps = 0; // K; each walk holds K+1 nodes
    std::vector<NodeRef> nodes; // num_walks * (walk_steps + 1), walk-major

    NodeRef at(std::size_t walk, std::size_t step) const { return nodes[walk * (walk_steps + 1) + step]; }
};

InteractionGraph build_graph(const std::vector<Interaction>& interactions, std::uint32_t n_users,
                             std::uint32_t n_items);

// Uniform random walk: each step moves to a uniformly drawn neighbor of the
// current node, independently per walk and per step; revisits allowed.
WalkSet sample_walks(const InteractionGraph& graph, NodeRef origin, std::size_t num_walks,
                     std::size_t walk_steps, Rng& rng);

// Deterministic S->infinity limit of walk pooling: layer k is the expected
// embedding of the walk position after k steps, computed by dynamic
// programming over the walk distribution (same degree-0 self-loop rule).
LayerReps exact_layer_means(const InteractionGraph& graph, NodeRef origin, std::size_t walk_steps,
                            const EmbeddingStore& embeddings);

// Walk-pooled layer representations for every node on one side, sampled with
// a per-origin RNG derived from (master_seed, side, id). Embarrassingly
// parallel across origins; output is identical for any thread count.
LayerRepsTable precompute_layer_reps(const InteractionGraph& graph, const EmbeddingStore& embeddings,
                                     NodeSide side, std::size_t num_walks, std::size_t walk_steps,
                                     std::uint64_t master_seed, int n_threads);

} // namespace gnp
