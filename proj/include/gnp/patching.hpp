#pragma once

#include <span>
#include <vector>

#include "gnp/common.hpp"
#include "gnp/rng.hpp"

namespace gnp {

// Fully-connected network: Tanh on hidden layers, identity on the output
// layer. hidden_depth == 0 degenerates to a single linear map.
struct Mlp {
    struct Layer {
        MatD weight; // out_dim x in_dim, row-major
        std::vector<double> bias;
    };
    std::vector<Layer> layers;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
};

// Symmetric fan-based (Glorot-uniform) initialization.
Mlp make_mlp(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, int hidden_depth, Rng& rng);

// Same-shaped zero network, used as a gradient accumulator.
Mlp zeros_like(const Mlp& mlp);

// Post-activation values per layer, kept for the backward pass.
struct MlpWorkspace {
    std::vector<std::vector<double>> activations; // [0]=input, [l+1]=output of layer l
};

void mlp_forward(const Mlp& mlp, std::span<const double> input, MlpWorkspace& ws);
std::vector<double> mlp_forward(const Mlp& mlp, std::span<const double> input);

// Exact reverse-mode gradients of mlp_forward. Parameter gradients are
// accumulated into `grads` (same shapes as `mlp`); returns the input gradient.
std::vector<double> mlp_backward(const Mlp& mlp, const MlpWorkspace& ws, std::span<const double> upstream,
                                 Mlp& grads);

// Whole-vector Bernoulli mask: with probability tau the zero placeholder,
// otherwise the representation unchanged.
std::vector<double> mask(std::span<const double> rep, double tau, Rng& rng);

// Patched representation: MLP forward over [masked_rep (+) features].
std::vector<double> patch_user(std::span<const double> masked_rep, std::span<const float> features,
                               const Mlp& user_mlp);
std::vector<double> patch_item(std::span<const double> masked_rep, std::span<const float> features,
                               const Mlp& item_mlp);

double cold_score(std::span<const double> user_patched, std::span<const double> item_patched);

// Simplified DropoutNet relevance: the same mask/patch/inner-product
// machinery applied to raw embeddings, used for warm and cold pairs alike.
double dropoutnet_score(std::span<const double> user_embed_masked, std::span<const float> user_features,
                        std::span<const double> item_embed_masked, std::span<const float> item_features,
                        const Mlp& user_mlp, const Mlp& item_mlp);

// Concatenation helper shared by the patch paths.
std::vector<double> concat_input(std::span<const double> rep, std::span<const float> features);

} // namespace gnp
