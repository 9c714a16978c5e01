#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gnp/patching.hpp"
#include "gnp/reps.hpp"
#include "test_util.hpp"

using namespace gnp;

namespace {

// Single linear layer passing the first `dim` inputs through unchanged and
// dropping the feature tail.
Mlp identity_patch_mlp(std::size_t dim, std::size_t feat_dim) {
    Mlp mlp;
    mlp.in_dim = dim + feat_dim;
    mlp.out_dim = dim;
    Mlp::Layer layer;
    layer.weight = MatD(dim, dim + feat_dim);
    layer.bias.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) layer.weight.at(i, i) = 1.0;
    mlp.layers.push_back(std::move(layer));
    return mlp;
}

} // namespace

TEST_CASE("mask: tau 0 passes through, tau 1 zeroes, zero is a fixed point") {
    Rng rng(1);
    const std::vector<double> x = {1.0, -2.0, 3.0};
    for (int t = 0; t < 50; ++t) {
        CHECK(mask(x, 0.0, rng) == x);
        CHECK(mask(x, 1.0, rng) == std::vector<double>{0, 0, 0});
    }
    const std::vector<double> zero = {0, 0, 0};
    for (double tau : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(mask(zero, tau, rng) == zero);
    }
    CHECK_THROWS_AS(mask(x, 1.5, rng), ConfigError);
}

TEST_CASE("mask fires at the configured rate") {
    Rng rng(2);
    const std::vector<double> x = {1.0};
    int zeroed = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        if (mask(x, 0.5, rng)[0] == 0.0) ++zeroed;
    }
    const double sigma = std::sqrt(n * 0.25);
    CHECK(std::abs(zeroed - n / 2) <= 3.0 * sigma);
}

TEST_CASE("identity MLP with zero features reproduces the masked rep") {
    const Mlp mlp = identity_patch_mlp(3, 2);
    const std::vector<double> rep = {0.5, -1.0, 2.0};
    const std::vector<float> feats = {0.0f, 0.0f};
    CHECK(patch_user(rep, feats, mlp) == rep);
    CHECK(patch_item(rep, feats, mlp) == rep);
}

TEST_CASE("all-zero MLP maps everything to zero") {
    Mlp mlp;
    mlp.in_dim = 4;
    mlp.out_dim = 2;
    Mlp::Layer layer;
    layer.weight = MatD(2, 4);
    layer.bias.assign(2, 0.0);
    mlp.layers.push_back(layer);
    const std::vector<double> rep = {1, 2};
    const std::vector<float> feats = {3, 4};
    CHECK(patch_user(rep, feats, mlp) == std::vector<double>{0, 0});
}

TEST_CASE("hand-set 2-2-2 network forward matches the tanh arithmetic") {
    Mlp mlp;
    mlp.in_dim = 2;
    mlp.out_dim = 2;
    Mlp::Layer h;
    h.weight = MatD(2, 2);
    h.weight.at(0, 0) = 0.5;
    h.weight.at(0, 1) = -0.25;
    h.weight.at(1, 0) = 1.0;
    h.weight.at(1, 1) = 0.75;
    h.bias = {0.1, -0.2};
    Mlp::Layer o;
    o.weight = MatD(2, 2);
    o.weight.at(0, 0) = 2.0;
    o.weight.at(0, 1) = -1.0;
    o.weight.at(1, 0) = 0.25;
    o.weight.at(1, 1) = 0.5;
    o.bias = {0.0, 1.0};
    mlp.layers = {h, o};

    const std::vector<double> in = {1.0, -2.0};
    const double a0 = std::tanh(0.5 * 1.0 + (-0.25) * (-2.0) + 0.1);
    const double a1 = std::tanh(1.0 * 1.0 + 0.75 * (-2.0) - 0.2);
    const std::vector<double> got = mlp_forward(mlp, in);
    CHECK(std::abs(got[0] - (2.0 * a0 - a1)) < 1e-6);
    CHECK(std::abs(got[1] - (0.25 * a0 + 0.5 * a1 + 1.0)) < 1e-6);
}

TEST_CASE("cold score is an inner product") {
    CHECK(cold_score(std::vector<double>{0, 0}, std::vector<double>{1, 2}) == 0.0);
    CHECK(cold_score(std::vector<double>{1, 0}, std::vector<double>{1, 0}) == 1.0);
    const std::vector<double> a = {1.5, -0.5, 2.0};
    const std::vector<double> b = {2.0, 4.0, 0.25};
    CHECK(cold_score(a, b) == doctest::Approx(1.5 * 2 - 0.5 * 4 + 2 * 0.25));
    CHECK_THROWS_AS(cold_score(a, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("backward: zero upstream and the linear-map adjoint") {
    Rng rng(3);
    const Mlp mlp = make_mlp(3, 4, 2, 1, rng);
    MlpWorkspace ws;
    mlp_forward(mlp, std::vector<double>{0.5, -1.0, 0.25}, ws);
    Mlp grads = zeros_like(mlp);
    const std::vector<double> gin = mlp_backward(mlp, ws, std::vector<double>{0.0, 0.0}, grads);
    CHECK(gin == std::vector<double>{0, 0, 0});
    for (const auto& layer : grads.layers) {
        for (double v : layer.weight.data) CHECK(v == 0.0);
        for (double v : layer.bias) CHECK(v == 0.0);
    }

    // Single linear layer: input grad is W^T upstream.
    Mlp lin;
    lin.in_dim = 2;
    lin.out_dim = 2;
    Mlp::Layer layer;
    layer.weight = MatD(2, 2);
    layer.weight.at(0, 0) = 1.0;
    layer.weight.at(0, 1) = 2.0;
    layer.weight.at(1, 0) = 3.0;
    layer.weight.at(1, 1) = 4.0;
    layer.bias = {0.0, 0.0};
    lin.layers.push_back(layer);
    MlpWorkspace ws2;
    mlp_forward(lin, std::vector<double>{1.0, 1.0}, ws2);
    Mlp lgrads = zeros_like(lin);
    const std::vector<double> g = mlp_backward(lin, ws2, std::vector<double>{5.0, 7.0}, lgrads);
    CHECK(g[0] == doctest::Approx(1.0 * 5 + 3.0 * 7));
    CHECK(g[1] == doctest::Approx(2.0 * 5 + 4.0 * 7));
}

TEST_CASE("backward gradients match central finite differences") {
    Rng rng(4);
    Mlp mlp = make_mlp(4, 5, 3, 2, rng);
    std::vector<double> input(4);
    for (double& v : input) v = rng.uniform(-1, 1);
    std::vector<double> upstream(3);
    for (double& v : upstream) v = rng.uniform(-1, 1);

    // Scalar objective: <upstream, mlp(input)>.
    const auto objective = [&] {
        const std::vector<double> out = mlp_forward(mlp, input);
        double s = 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) s += upstream[j] * out[j];
        return s;
    };

    MlpWorkspace ws;
    mlp_forward(mlp, input, ws);
    Mlp grads = zeros_like(mlp);
    const std::vector<double> gin = mlp_backward(mlp, ws, upstream, grads);

    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        for (std::size_t t = 0; t < mlp.layers[l].weight.data.size(); ++t) {
            const double fd = testutil::central_diff(&mlp.layers[l].weight.data[t], objective);
            CHECK(testutil::rel_err(grads.layers[l].weight.data[t], fd) < 1e-4);
        }
        for (std::size_t t = 0; t < mlp.layers[l].bias.size(); ++t) {
            const double fd = testutil::central_diff(&mlp.layers[l].bias[t], objective);
            CHECK(testutil::rel_err(grads.layers[l].bias[t], fd) < 1e-4);
        }
    }
    for (std::size_t t = 0; t < input.size(); ++t) {
        const double fd = testutil::central_diff(&input[t], objective);
        CHECK(testutil::rel_err(gin[t], fd) < 1e-4);
    }
}

TEST_CASE("dropoutnet scoring: masked sides depend only on features") {
    Rng rng(6);
    const Mlp user_mlp = make_mlp(3 + 2, 4, 3, 1, rng);
    const Mlp item_mlp = make_mlp(3 + 2, 4, 3, 1, rng);
    const std::vector<double> zero3 = {0, 0, 0};
    const std::vector<float> cu = {0.5f, -1.0f};
    const std::vector<float> ci = {2.0f, 0.25f};

    // tau = 1 on both sides: raw embeddings cannot matter.
    const double s1 = dropoutnet_score(zero3, cu, zero3, ci, user_mlp, item_mlp);
    const double s2 = dropoutnet_score(zero3, cu, zero3, ci, user_mlp, item_mlp);
    CHECK(s1 == s2); // deterministic at inference

    // Zero features + masked reps: a constant determined by the biases.
    const std::vector<float> zf = {0.0f, 0.0f};
    const double c1 = dropoutnet_score(zero3, zf, zero3, zf, user_mlp, item_mlp);
    const double c2 = dropoutnet_score(zero3, zf, zero3, zf, user_mlp, item_mlp);
    CHECK(c1 == c2);

    const std::vector<double> u_unmasked = {1.0, 2.0, 3.0};
    CHECK(dropoutnet_score(u_unmasked, cu, zero3, ci, user_mlp, item_mlp) != s1);
}

TEST_CASE("degenerate layer reps make the patched score equal dropoutnet") {
    // Depth-0 reps with weight e0 are exactly the raw embeddings.
    Rng rng(7);
    const std::size_t d = 3;
    LayerRepsTable users(2, 0, d), items(2, 0, d);
    for (float& v : users.data.data) v = static_cast<float>(rng.uniform(-1, 1));
    for (float& v : items.data.data) v = static_cast<float>(rng.uniform(-1, 1));
    const Mlp user_mlp = make_mlp(d + 2, 4, d, 1, rng);
    const Mlp item_mlp = make_mlp(d + 2, 4, d, 1, rng);
    const std::vector<float> cu = {0.1f, 0.9f};
    const std::vector<float> ci = {-0.4f, 0.6f};

    const std::vector<double> e0 = {1.0};
    for (std::uint32_t u = 0; u < 2; ++u) {
        for (std::uint32_t i = 0; i < 2; ++i) {
            std::vector<double> xu(d), xi(d);
            for (std::size_t j = 0; j < d; ++j) {
                xu[j] = e0[0] * users.layer(u, 0)[j];
                xi[j] = e0[0] * items.layer(i, 0)[j];
            }
            const double via_patch = cold_score(patch_user(xu, cu, user_mlp), patch_item(xi, ci, item_mlp));
            std::vector<double> raw_u(d), raw_i(d);
            for (std::size_t j = 0; j < d; ++j) {
                raw_u[j] = users.layer(u, 0)[j];
                raw_i[j] = items.layer(i, 0)[j];
            }
            const double via_dropoutnet = dropoutnet_score(raw_u, cu, raw_i, ci, user_mlp, item_mlp);
            CHECK(via_patch == via_dropoutnet);
        }
    }
}
