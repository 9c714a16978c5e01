#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnp/graph.hpp"
#include "gnp/gwarmer.hpp"
#include "test_util.hpp"

using namespace gnp;

namespace {

EmbeddingStore small_store() {
    EmbeddingStore s;
    s.dim = 2;
    s.user_embeddings = MatF(2, 2);
    s.item_embeddings = MatF(2, 2);
    s.user_embeddings.at(0, 0) = 1.0f;
    s.user_embeddings.at(0, 1) = 2.0f;
    s.user_embeddings.at(1, 0) = -1.0f;
    s.user_embeddings.at(1, 1) = 0.5f;
    s.item_embeddings.at(0, 0) = 3.0f;
    s.item_embeddings.at(0, 1) = -4.0f;
    s.item_embeddings.at(1, 0) = 0.25f;
    s.item_embeddings.at(1, 1) = 8.0f;
    s.user_trained.assign(2, 1);
    s.item_trained.assign(2, 1);
    return s;
}

WalkSet hand_walks(std::size_t steps, const std::vector<std::vector<NodeRef>>& walks) {
    WalkSet ws;
    ws.origin = walks[0][0];
    ws.num_walks = walks.size();
    ws.walk_steps = steps;
    for (const auto& w : walks) {
        for (const NodeRef& n : w) ws.nodes.push_back(n);
    }
    return ws;
}

} // namespace

TEST_CASE("single-walk pooling copies the walk's embeddings") {
    const EmbeddingStore s = small_store();
    const WalkSet ws = hand_walks(2, {{{NodeSide::user, 0}, {NodeSide::item, 1}, {NodeSide::user, 1}}});
    const LayerReps reps = walk_pool(ws, s);
    CHECK(reps.layer(0)[0] == 1.0);
    CHECK(reps.layer(0)[1] == 2.0);
    CHECK(reps.layer(1)[0] == doctest::Approx(0.25));
    CHECK(reps.layer(1)[1] == doctest::Approx(8.0));
    CHECK(reps.layer(2)[0] == doctest::Approx(-1.0));
}

TEST_CASE("forced path pooling alternates the two embeddings exactly") {
    const EmbeddingStore s = small_store();
    std::vector<std::vector<NodeRef>> walks(5);
    for (auto& w : walks) {
        w = {{NodeSide::user, 0}, {NodeSide::item, 0}, {NodeSide::user, 0}, {NodeSide::item, 0}};
    }
    const LayerReps reps = walk_pool(hand_walks(3, walks), s);
    CHECK(reps.layer(0)[0] == 1.0);
    CHECK(reps.layer(1)[0] == doctest::Approx(3.0));
    CHECK(reps.layer(1)[1] == doctest::Approx(-4.0));
    CHECK(reps.layer(2)[0] == doctest::Approx(1.0));
    CHECK(reps.layer(3)[1] == doctest::Approx(-4.0));
}

TEST_CASE("four hand-written walks pool to hand-computed means") {
    const EmbeddingStore s = small_store();
    // Step-1 nodes: i0, i0, i1, i1 -> mean = (3+3+0.25+0.25)/4, (-4-4+8+8)/4.
    const WalkSet ws = hand_walks(1, {{{NodeSide::user, 0}, {NodeSide::item, 0}},
                                      {{NodeSide::user, 0}, {NodeSide::item, 0}},
                                      {{NodeSide::user, 0}, {NodeSide::item, 1}},
                                      {{NodeSide::user, 0}, {NodeSide::item, 1}}});
    const LayerReps reps = walk_pool(ws, s);
    CHECK(std::abs(reps.layer(1)[0] - 1.625) < 1e-9);
    CHECK(std::abs(reps.layer(1)[1] - 2.0) < 1e-9);
}

TEST_CASE("layer-0 anchoring is bitwise") {
    const EmbeddingStore s = small_store();
    std::vector<std::vector<NodeRef>> walks(25);
    for (auto& w : walks) w = {{NodeSide::item, 1}, {NodeSide::user, 1}};
    const LayerReps reps = walk_pool(hand_walks(1, walks), s);
    CHECK(reps.layer(0)[0] == static_cast<double>(s.item_embeddings.at(1, 0)));
    CHECK(reps.layer(0)[1] == static_cast<double>(s.item_embeddings.at(1, 1)));
}

TEST_CASE("pooling is permutation invariant to 1e-12") {
    Rng rng(5);
    EmbeddingStore s;
    s.dim = 6;
    s.user_embeddings = MatF(30, 6);
    s.item_embeddings = MatF(30, 6);
    for (float& v : s.user_embeddings.data) v = static_cast<float>(rng.uniform(-1, 1));
    for (float& v : s.item_embeddings.data) v = static_cast<float>(rng.uniform(-1, 1));

    std::vector<std::vector<NodeRef>> walks(41);
    for (auto& w : walks) {
        w.push_back({NodeSide::user, 0});
        for (int k = 1; k <= 3; ++k) {
            w.push_back({k % 2 ? NodeSide::item : NodeSide::user,
                         static_cast<std::uint32_t>(rng.uniform_index(30))});
        }
    }
    const LayerReps a = walk_pool(hand_walks(3, walks), s);
    rng.shuffle(walks);
    const LayerReps b = walk_pool(hand_walks(3, walks), s);
    for (std::size_t k = 0; k <= 3; ++k) {
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(std::abs(a.layer(k)[j] - b.layer(k)[j]) <= 1e-12);
        }
    }
}

TEST_CASE("combine: basis weights recover the raw embedding, zeros vanish") {
    const EmbeddingStore s = small_store();
    LayerReps reps;
    reps.node = {NodeSide::user, 0};
    reps.depth = 2;
    reps.dim = 2;
    reps.vectors = MatD(3, 2);
    reps.vectors.at(0, 0) = 1.0;
    reps.vectors.at(0, 1) = 2.0;
    reps.vectors.at(1, 0) = -3.0;
    reps.vectors.at(1, 1) = 5.0;
    reps.vectors.at(2, 0) = 0.5;
    reps.vectors.at(2, 1) = -0.25;

    const std::vector<double> e0 = {1.0, 0.0, 0.0};
    CHECK(combine(reps, e0) == std::vector<double>{1.0, 2.0});
    const std::vector<double> zeros = {0.0, 0.0, 0.0};
    CHECK(combine(reps, zeros) == std::vector<double>{0.0, 0.0});
    // Hand sum with weights (0.5, 2, -1): (0.5*1 + 2*(-3) - 0.5, 0.5*2 + 2*5 + 0.25).
    const std::vector<double> w = {0.5, 2.0, -1.0};
    const std::vector<double> got = combine(reps, w);
    CHECK(got[0] == doctest::Approx(-6.0));
    CHECK(got[1] == doctest::Approx(11.25));

    CHECK_THROWS_AS(combine(reps, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("warm scores are inner products, batch matches scalar") {
    const std::vector<double> zero = {0, 0, 0, 0};
    const std::vector<double> a = {1, 0, 0, 0};
    const std::vector<double> b = {0, 1, 0, 0};
    CHECK(warm_score(zero, a) == 0.0);
    CHECK(warm_score(a, b) == 0.0);
    CHECK(warm_score(a, a) == 1.0);
    const std::vector<double> u = {1.5, -2.0, 0.25, 3.0};
    const std::vector<double> v = {2.0, 0.5, -4.0, 1.0};
    CHECK(warm_score(u, v) == doctest::Approx(1.5 * 2 - 2 * 0.5 - 0.25 * 4 + 3.0));

    MatD items(3, 4);
    const double vals[3][4] = {{1, 0, 0, 0}, {0, 0, 0, 0}, {2, -1, 0.5, 0.25}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) items.at(i, j) = vals[i][j];
    }
    std::vector<double> out(3);
    warm_score_batch(u, items, out);
    for (int i = 0; i < 3; ++i) {
        CHECK(out[i] == warm_score(u, items.row(i)));
    }
    std::vector<double> zout(3);
    warm_score_batch(zero, items, zout);
    CHECK(zout == std::vector<double>{0, 0, 0});
}

TEST_CASE("warm score is bilinear") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(5), y(5);
        for (double& v : x) v = rng.uniform(-2, 2);
        for (double& v : y) v = rng.uniform(-2, 2);
        const double alpha = rng.uniform(-3, 3);
        std::vector<double> ax = x;
        for (double& v : ax) v *= alpha;
        const double lhs = warm_score(ax, y);
        const double rhs = alpha * warm_score(x, y);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("score gradient in the layer weights matches finite differences") {
    Rng rng(21);
    const std::size_t K = 3, d = 6;
    LayerRepsTable users(1, K, d), items(1, K, d);
    for (float& v : users.data.data) v = static_cast<float>(rng.uniform(-1, 1));
    for (float& v : items.data.data) v = static_cast<float>(rng.uniform(-1, 1));
    std::vector<double> wu(K + 1), wi(K + 1);
    for (double& v : wu) v = rng.uniform(-1, 1);
    for (double& v : wi) v = rng.uniform(-1, 1);

    const auto combine_t = [&](const LayerRepsTable& t, const std::vector<double>& w) {
        std::vector<double> out(d, 0.0);
        for (std::size_t k = 0; k <= K; ++k) {
            const auto layer = t.layer(0, k);
            for (std::size_t j = 0; j < d; ++j) out[j] += w[k] * layer[j];
        }
        return out;
    };
    const auto score = [&] { return warm_score(combine_t(users, wu), combine_t(items, wi)); };

    const std::vector<double> xi = combine_t(items, wi);
    const std::vector<double> xu = combine_t(users, wu);
    for (std::size_t k = 0; k <= K; ++k) {
        double analytic_u = 0.0, analytic_i = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            analytic_u += static_cast<double>(users.layer(0, k)[j]) * xi[j];
            analytic_i += static_cast<double>(items.layer(0, k)[j]) * xu[j];
        }
        CHECK(testutil::rel_err(analytic_u, testutil::central_diff(&wu[k], score)) < 1e-4);
        CHECK(testutil::rel_err(analytic_i, testutil::central_diff(&wi[k], score)) < 1e-4);
    }
}
