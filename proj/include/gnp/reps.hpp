#pragma once

#include <cstdint>
#include <string>

#include "gnp/common.hpp"

namespace gnp {

// Per-node stack of pooled layer vectors for depths 0..K. Layer 0 is the
// node's own embedding.
struct LayerReps {
    NodeRef node;
    std::size_t depth = 0; // K
    std::size_t dim = 0;
    MatD vectors; // (K+1) x dim

    std::span<const double> layer(std::size_t k) const { return vectors.row(k); }
};

// Offline-precomputed layer representations for one side of the graph.
struct LayerRepsTable {
    std::size_t n_nodes = 0;
    std::size_t depth = 0; // K
    std::size_t dim = 0;
    MatF data; // n_nodes x ((K+1) * dim)

    LayerRepsTable() = default;
    LayerRepsTable(std::size_t n, std::size_t k, std::size_t d)
        : n_nodes(n), depth(k), dim(d), data(n, (k + 1) * d) {}

    std::span<const float> layer(std::size_t node, std::size_t k) const {
        return data.row(node).subspan(k * dim, dim);
    }
    std::span<float> layer(std::size_t node, std::size_t k) {
        return data.row(node).subspan(k * dim, dim);
    }
};

// Cache file: u32 n_nodes, u32 K, u32 dim, then per node (K+1)*dim f32, LE.
void write_reps_cache(const std::string& path, const LayerRepsTable& table);
LayerRepsTable read_reps_cache(const std::string& path);

} // namespace gnp
