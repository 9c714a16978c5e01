#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/gwarmer.hpp"
#include "gnp/patching.hpp"

namespace gnp {

enum class ModelKind : std::uint32_t { gnp = 0, dropoutnet = 1 };

// All trainable state. For the dropoutnet baseline the adaptive weights are
// pinned to a single 1.0 per side (layer-0 identity) and never optimized.
struct GnpParams {
    ModelKind kind = ModelKind::gnp;
    std::size_t rep_dim = 0;
    AdaptiveWeights adaptive;
    Mlp user_mlp;
    Mlp item_mlp;
};

GnpParams init_gnp_params(ModelKind kind, std::size_t walk_steps, std::size_t rep_dim,
                          std::size_t user_feat_dim, std::size_t item_feat_dim, std::size_t hidden_dim,
                          int mlp_depth, std::uint64_t seed);

GnpParams zeros_like(const GnpParams& params);

// Fixed enumeration of the trainable tensors (adaptive weights only for the
// gnp kind, then user MLP layers, then item MLP layers). Adam, the l2
// penalty, and the finite-difference tests all walk this same order.
std::vector<std::span<double>> param_tensors(GnpParams& params);
std::vector<std::span<const double>> param_tensors(const GnpParams& params);

bool all_finite(const GnpParams& params);

// Checkpoint file: magic "GNPC", u32 version, u32 kind, u32 walk depth K,
// u32 rep dim, adaptive weights (2 x (K+1) f32), then both MLPs as
// (u32 n_layers, per layer u32 out, u32 in, f32 weights row-major, f32
// biases); little-endian throughout.
void save_checkpoint(const std::string& path, const GnpParams& params);
GnpParams load_checkpoint(const std::string& path);

} // namespace gnp
