#include "gnp/graph.hpp"

#include <algorithm>

#include "gnp/gwarmer.hpp"
#include "gnp/kernels.hpp"

namespace gnp {

InteractionGraph build_graph(const std::vector<Interaction>& interactions, std::uint32_t n_users,
                             std::uint32_t n_items) {
    InteractionGraph g;
    g.n_users = n_users;
    g.n_items = n_items;
    g.user_adj.resize(n_users);
    g.item_adj.resize(n_items);
    for (const Interaction& r : interactions) {
        if (r.user >= n_users || r.item >= n_items) {
            throw DataError("interaction id out of range: (" + std::to_string(r.user) + ", " +
                            std::to_string(r.item) + ")");
        }
        g.user_adj[r.user].push_back(r.item);
        g.item_adj[r.item].push_back(r.user);
    }
    for (auto& adj : g.user_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    for (auto& adj : g.item_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return g;
}

WalkSet sample_walks(const InteractionGraph& graph, NodeRef origin, std::size_t num_walks,
                     std::size_t walk_steps, Rng& rng) {
    if (num_walks < 1 || walk_steps < 1) throw ConfigError("sample_walks: need num_walks >= 1 and walk_steps >= 1");
    const std::uint32_t limit = origin.side == NodeSide::user ? graph.n_users : graph.n_items;
    if (origin.id >= limit) throw DataError("sample_walks: origin id out of range");

    WalkSet ws;
    ws.origin = origin;
    ws.num_walks = num_walks;
    ws.walk_steps = walk_steps;
    ws.nodes.resize(num_walks * (walk_steps + 1));
    for (std::size_t s = 0; s < num_walks; ++s) {
        NodeRef cur = origin;
        ws.nodes[s * (walk_steps + 1)] = cur;
        for (std::size_t k = 1; k <= walk_steps; ++k) {
            const auto& adj = cur.side == NodeSide::user ? graph.user_adj[cur.id] : graph.item_adj[cur.id];
            if (!adj.empty()) {
                const std::uint32_t next = adj[rng.uniform_index(adj.size())];
                cur = {cur.side == NodeSide::user ? NodeSide::item : NodeSide::user, next};
            }
            // degree 0: self-loop, cur unchanged
            ws.nodes[s * (walk_steps + 1) + k] = cur;
        }
    }
    return ws;
}

LayerReps exact_layer_means(const InteractionGraph& graph, NodeRef origin, std::size_t walk_steps,
                            const EmbeddingStore& embeddings) {
    const std::size_t dim = embeddings.dim;
    LayerReps reps;
    reps.node = origin;
    reps.depth = walk_steps;
    reps.dim = dim;
    reps.vectors = MatD(walk_steps + 1, dim);

    // Walk-position distribution, one probability slot per node on each side.
    std::vector<double> p_user(graph.n_users, 0.0), p_item(graph.n_items, 0.0);
    if (origin.side == NodeSide::user) {
        p_user[origin.id] = 1.0;
    } else {
        p_item[origin.id] = 1.0;
    }

    for (std::size_t k = 0; k <= walk_steps; ++k) {
        auto out = reps.vectors.row(k);
        for (std::uint32_t u = 0; u < graph.n_users; ++u) {
            if (p_user[u] == 0.0) continue;
            axpy_float(p_user[u], embeddings.user_embeddings.row(u), out);
        }
        for (std::uint32_t i = 0; i < graph.n_items; ++i) {
            if (p_item[i] == 0.0) continue;
            axpy_float(p_item[i], embeddings.item_embeddings.row(i), out);
        }
        if (k == walk_steps) break;

        std::vector<double> next_user(graph.n_users, 0.0), next_item(graph.n_items, 0.0);
        for (std::uint32_t u = 0; u < graph.n_users; ++u) {
            const double p = p_user[u];
            if (p == 0.0) continue;
            const auto& adj = graph.user_adj[u];
            if (adj.empty()) {
                next_user[u] += p; // self-loop
            } else {
                const double share = p / static_cast<double>(adj.size());
                for (std::uint32_t i : adj) next_item[i] += share;
            }
        }
        for (std::uint32_t i = 0; i < graph.n_items; ++i) {
            const double p = p_item[i];
            if (p == 0.0) continue;
            const auto& adj = graph.item_adj[i];
            if (adj.empty()) {
                next_item[i] += p;
            } else {
                const double share = p / static_cast<double>(adj.size());
                for (std::uint32_t u : adj) next_user[u] += share;
            }
        }
        p_user = std::move(next_user);
        p_item = std::move(next_item);
    }
    return reps;
}

LayerRepsTable precompute_layer_reps(const InteractionGraph& graph, const EmbeddingStore& embeddings,
                                     NodeSide side, std::size_t num_walks, std::size_t walk_steps,
                                     std::uint64_t master_seed, int n_threads) {
    const std::size_t n = side == NodeSide::user ? graph.n_users : graph.n_items;
    LayerRepsTable table(n, walk_steps, embeddings.dim);
    parallel_for(n, n_threads, [&](std::size_t id) {
        Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(side), id));
        const NodeRef origin{side, static_cast<std::uint32_t>(id)};
        const WalkSet walks = sample_walks(graph, origin, num_walks, walk_steps, rng);
        const LayerReps reps = walk_pool(walks, embeddings);
        for (std::size_t k = 0; k <= walk_steps; ++k) {
            auto dst = table.layer(id, k);
            const auto src = reps.layer(k);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<float>(src[j]);
        }
    });
    return table;
}

} // namespace gnp
