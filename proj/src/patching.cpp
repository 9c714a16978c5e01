#include "gnp/patching.hpp"

#include <cmath>

#include "gnp/kernels.hpp"

namespace gnp {

Mlp make_mlp(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, int hidden_depth, Rng& rng) {
    if (in_dim == 0 || out_dim == 0) throw ConfigError("make_mlp: zero dimension");
    if (hidden_depth < 0) throw ConfigError("make_mlp: negative depth");
    Mlp mlp;
    mlp.in_dim = in_dim;
    mlp.out_dim = out_dim;
    std::size_t prev = in_dim;
    for (int l = 0; l <= hidden_depth; ++l) {
        const std::size_t width = (l == hidden_depth) ? out_dim : hidden_dim;
        Mlp::Layer layer;
        layer.weight = MatD(width, prev);
        layer.bias.assign(width, 0.0);
        const double bound = std::sqrt(6.0 / static_cast<double>(prev + width));
        for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
        mlp.layers.push_back(std::move(layer));
        prev = width;
    }
    return mlp;
}

Mlp zeros_like(const Mlp& mlp) {
    Mlp z;
    z.in_dim = mlp.in_dim;
    z.out_dim = mlp.out_dim;
    z.layers.resize(mlp.layers.size());
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        z.layers[l].weight = MatD(mlp.layers[l].weight.rows, mlp.layers[l].weight.cols);
        z.layers[l].bias.assign(mlp.layers[l].bias.size(), 0.0);
    }
    return z;
}

void mlp_forward(const Mlp& mlp, std::span<const double> input, MlpWorkspace& ws) {
    if (input.size() != mlp.in_dim) throw ConfigError("mlp_forward: input dim mismatch");
    ws.activations.resize(mlp.layers.size() + 1);
    ws.activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        const Mlp::Layer& layer = mlp.layers[l];
        const std::vector<double>& a = ws.activations[l];
        std::vector<double>& out = ws.activations[l + 1];
        out.resize(layer.bias.size());
        const bool hidden = l + 1 < mlp.layers.size();
        for (std::size_t r = 0; r < layer.weight.rows; ++r) {
            const double z = dot(layer.weight.row(r), a) + layer.bias[r];
            out[r] = hidden ? std::tanh(z) : z;
        }
    }
}

std::vector<double> mlp_forward(const Mlp& mlp, std::span<const double> input) {
    MlpWorkspace ws;
    mlp_forward(mlp, input, ws);
    return ws.activations.back();
}

std::vector<double> mlp_backward(const Mlp& mlp, const MlpWorkspace& ws, std::span<const double> upstream,
                                 Mlp& grads) {
    std::vector<double> g(upstream.begin(), upstream.end());
    std::vector<double> g_prev;
    for (std::size_t l = mlp.layers.size(); l-- > 0;) {
        const Mlp::Layer& layer = mlp.layers[l];
        const std::vector<double>& a_in = ws.activations[l];
        const std::vector<double>& a_out = ws.activations[l + 1];
        const bool hidden = l + 1 < mlp.layers.size();
        if (hidden) {
            for (std::size_t r = 0; r < g.size(); ++r) g[r] *= 1.0 - a_out[r] * a_out[r];
        }
        Mlp::Layer& glayer = grads.layers[l];
        g_prev.assign(a_in.size(), 0.0);
        for (std::size_t r = 0; r < layer.weight.rows; ++r) {
            const double gz = g[r];
            glayer.bias[r] += gz;
            auto wrow = layer.weight.row(r);
            auto gwrow = glayer.weight.row(r);
            for (std::size_t c = 0; c < wrow.size(); ++c) {
                gwrow[c] += gz * a_in[c];
                g_prev[c] += gz * wrow[c];
            }
        }
        g = g_prev;
    }
    return g;
}

std::vector<double> mask(std::span<const double> rep, double tau, Rng& rng) {
    if (tau < 0.0 || tau > 1.0) throw ConfigError("mask: tau must be in [0,1]");
    if (rng.bernoulli(tau)) return std::vector<double>(rep.size(), 0.0);
    return {rep.begin(), rep.end()};
}

std::vector<double> concat_input(std::span<const double> rep, std::span<const float> features) {
    std::vector<double> in;
    in.reserve(rep.size() + features.size());
    in.insert(in.end(), rep.begin(), rep.end());
    for (float f : features) in.push_back(static_cast<double>(f));
    return in;
}

std::vector<double> patch_user(std::span<const double> masked_rep, std::span<const float> features,
                               const Mlp& user_mlp) {
    return mlp_forward(user_mlp, concat_input(masked_rep, features));
}

std::vector<double> patch_item(std::span<const double> masked_rep, std::span<const float> features,
                               const Mlp& item_mlp) {
    return mlp_forward(item_mlp, concat_input(masked_rep, features));
}

double cold_score(std::span<const double> user_patched, std::span<const double> item_patched) {
    if (user_patched.size() != item_patched.size()) throw ConfigError("cold_score: dim mismatch");
    return dot(user_patched, item_patched);
}

double dropoutnet_score(std::span<const double> user_embed_masked, std::span<const float> user_features,
                        std::span<const double> item_embed_masked, std::span<const float> item_features,
                        const Mlp& user_mlp, const Mlp& item_mlp) {
    const std::vector<double> u = patch_user(user_embed_masked, user_features, user_mlp);
    const std::vector<double> i = patch_item(item_embed_masked, item_features, item_mlp);
    return cold_score(u, i);
}

} // namespace gnp
