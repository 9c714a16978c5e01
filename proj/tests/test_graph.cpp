#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnp/graph.hpp"
#include "gnp/gwarmer.hpp"
#include "gnp/split.hpp"
#include "gnp/synthgen.hpp"
#include "test_util.hpp"

using namespace gnp;

namespace {

// One-hot embeddings make expected layer vectors equal to the walk-position
// distribution itself.
EmbeddingStore one_hot_embeddings(std::uint32_t n_users, std::uint32_t n_items) {
    EmbeddingStore s;
    s.dim = n_users + n_items;
    s.user_embeddings = MatF(n_users, s.dim);
    s.item_embeddings = MatF(n_items, s.dim);
    s.user_trained.assign(n_users, 1);
    s.item_trained.assign(n_items, 1);
    for (std::uint32_t u = 0; u < n_users; ++u) s.user_embeddings.at(u, u) = 1.0f;
    for (std::uint32_t i = 0; i < n_items; ++i) s.item_embeddings.at(i, n_users + i) = 1.0f;
    return s;
}

} // namespace

TEST_CASE("graph construction: empty, hand adjacency, symmetry") {
    const InteractionGraph empty = build_graph({}, 3, 2);
    for (const auto& adj : empty.user_adj) CHECK(adj.empty());
    for (const auto& adj : empty.item_adj) CHECK(adj.empty());

    const InteractionGraph g = build_graph({{0, 0}, {0, 1}, {1, 1}}, 2, 2);
    CHECK(g.user_adj[0] == std::vector<std::uint32_t>{0, 1});
    CHECK(g.user_adj[1] == std::vector<std::uint32_t>{1});
    CHECK(g.item_adj[0] == std::vector<std::uint32_t>{0});
    CHECK(g.item_adj[1] == std::vector<std::uint32_t>{0, 1});

    CHECK_THROWS_AS(build_graph({{5, 0}}, 2, 2), DataError);
}

TEST_CASE("handshake: total degree is twice the interaction count on a real split") {
    SynthSpec spec;
    spec.n_users = 50;
    spec.n_items = 70;
    spec.seed = 4;
    const SynthData data = generate(spec);
    const DatasetSplit split = make_split(data.interactions, spec.n_users, spec.n_items, {0.2, 0.65, 0.15}, 5);
    const InteractionGraph g = build_graph(split.model_train, spec.n_users, spec.n_items);
    std::size_t degree_sum = 0;
    for (const auto& adj : g.user_adj) degree_sum += adj.size();
    for (const auto& adj : g.item_adj) degree_sum += adj.size();
    CHECK(degree_sum == 2 * split.model_train.size());
}

TEST_CASE("forced two-node path walks alternate deterministically") {
    const InteractionGraph g = build_graph({{0, 0}}, 1, 1);
    Rng rng(1);
    const WalkSet ws = sample_walks(g, {NodeSide::user, 0}, 10, 2, rng);
    for (std::size_t s = 0; s < ws.num_walks; ++s) {
        CHECK(ws.at(s, 0) == NodeRef{NodeSide::user, 0});
        CHECK(ws.at(s, 1) == NodeRef{NodeSide::item, 0});
        CHECK(ws.at(s, 2) == NodeRef{NodeSide::user, 0});
    }
}

TEST_CASE("walk sets have S walks of K+1 alternating nodes") {
    SynthSpec spec;
    spec.n_users = 20;
    spec.n_items = 30;
    spec.seed = 9;
    const SynthData data = generate(spec);
    const InteractionGraph g = build_graph(data.interactions, spec.n_users, spec.n_items);
    Rng rng(2);
    const WalkSet ws = sample_walks(g, {NodeSide::user, 3}, 25, 3, rng);
    CHECK(ws.num_walks == 25);
    CHECK(ws.walk_steps == 3);
    CHECK(ws.nodes.size() == 25 * 4);
    for (std::size_t s = 0; s < 25; ++s) {
        CHECK(ws.at(s, 0) == NodeRef{NodeSide::user, 3});
        for (std::size_t k = 1; k <= 3; ++k) {
            CHECK(ws.at(s, k).side != ws.at(s, k - 1).side); // no degree-0 nodes here
        }
    }

    Rng r1(77), r2(77);
    const WalkSet a = sample_walks(g, {NodeSide::item, 5}, 25, 3, r1);
    const WalkSet b = sample_walks(g, {NodeSide::item, 5}, 25, 3, r2);
    CHECK(a.nodes == b.nodes);
}

TEST_CASE("first step frequencies are uniform over three neighbors") {
    const InteractionGraph g = build_graph({{0, 0}, {0, 1}, {0, 2}}, 1, 3);
    Rng rng(3);
    const WalkSet ws = sample_walks(g, {NodeSide::user, 0}, 30000, 1, rng);
    int counts[3] = {0, 0, 0};
    for (std::size_t s = 0; s < ws.num_walks; ++s) ++counts[ws.at(s, 1).id];
    const double expected = 10000.0;
    const double sigma = std::sqrt(30000.0 * (1.0 / 3.0) * (2.0 / 3.0));
    for (int c : counts) CHECK(std::abs(c - expected) <= 3.0 * sigma);
}

TEST_CASE("degree-0 origin self-loops for the whole walk") {
    const InteractionGraph g = build_graph({{0, 0}}, 2, 1); // user 1 isolated
    Rng rng(4);
    const WalkSet ws = sample_walks(g, {NodeSide::user, 1}, 5, 3, rng);
    for (std::size_t s = 0; s < 5; ++s) {
        for (std::size_t k = 0; k <= 3; ++k) CHECK(ws.at(s, k) == NodeRef{NodeSide::user, 1});
    }

    const EmbeddingStore emb = one_hot_embeddings(2, 1);
    const LayerReps reps = exact_layer_means(g, {NodeSide::user, 1}, 3, emb);
    for (std::size_t k = 0; k <= 3; ++k) {
        CHECK(reps.layer(k)[1] == doctest::Approx(1.0));
    }
}

TEST_CASE("exact layer means: depth 0 and the forced path") {
    const InteractionGraph g = build_graph({{0, 0}}, 1, 1);
    const EmbeddingStore emb = one_hot_embeddings(1, 1);

    const LayerReps r0 = exact_layer_means(g, {NodeSide::user, 0}, 0, emb);
    CHECK(r0.vectors.rows == 1);
    CHECK(r0.layer(0)[0] == doctest::Approx(1.0));
    CHECK(r0.layer(0)[1] == doctest::Approx(0.0));

    const LayerReps r3 = exact_layer_means(g, {NodeSide::user, 0}, 3, emb);
    // Alternates user, item, user, item.
    CHECK(r3.layer(0)[0] == doctest::Approx(1.0));
    CHECK(r3.layer(1)[1] == doctest::Approx(1.0));
    CHECK(r3.layer(2)[0] == doctest::Approx(1.0));
    CHECK(r3.layer(3)[1] == doctest::Approx(1.0));
}

TEST_CASE("exact layer means match hand transition-matrix powers on a 4-node graph") {
    // users {u0, u1}, items {i0, i1}; edges u0-i0, u0-i1, u1-i1.
    const InteractionGraph g = build_graph({{0, 0}, {0, 1}, {1, 1}}, 2, 2);
    const EmbeddingStore emb = one_hot_embeddings(2, 2); // dims: [u0, u1, i0, i1]
    const LayerReps reps = exact_layer_means(g, {NodeSide::user, 0}, 2, emb);

    // Step 1 from u0: 1/2 i0, 1/2 i1.
    CHECK(reps.layer(1)[2] == doctest::Approx(0.5));
    CHECK(reps.layer(1)[3] == doctest::Approx(0.5));
    // Step 2: i0 -> u0 (1/2); i1 -> {u0, u1} (1/4 each) => u0 3/4, u1 1/4.
    CHECK(reps.layer(2)[0] == doctest::Approx(0.75));
    CHECK(reps.layer(2)[1] == doctest::Approx(0.25));
    CHECK(reps.layer(2)[2] == doctest::Approx(0.0));
}

TEST_CASE("sampled walk pooling converges to the exact layer means") {
    // <= 10 nodes, unit-norm embeddings (one-hot), S = 10^4.
    const InteractionGraph g =
        build_graph({{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {3, 0}, {0, 2}}, 4, 4);
    const EmbeddingStore emb = one_hot_embeddings(4, 4);
    Rng rng(6);
    const WalkSet ws = sample_walks(g, {NodeSide::user, 0}, 10000, 3, rng);
    const LayerReps sampled = walk_pool(ws, emb);
    const LayerReps exact = exact_layer_means(g, {NodeSide::user, 0}, 3, emb);
    for (std::size_t k = 0; k <= 3; ++k) {
        for (std::size_t j = 0; j < emb.dim; ++j) {
            CHECK(std::abs(sampled.layer(k)[j] - exact.layer(k)[j]) < 5e-2);
        }
    }
}

TEST_CASE("precomputed rep tables are seed-deterministic and cache round trips") {
    SynthSpec spec;
    spec.n_users = 15;
    spec.n_items = 25;
    spec.seed = 12;
    const SynthData data = generate(spec);
    const InteractionGraph g = build_graph(data.interactions, spec.n_users, spec.n_items);
    const EmbeddingStore emb = init_embeddings(spec.n_users, spec.n_items, 8, 77);

    const LayerRepsTable a = precompute_layer_reps(g, emb, NodeSide::item, 10, 3, 42, 1);
    const LayerRepsTable b = precompute_layer_reps(g, emb, NodeSide::item, 10, 3, 42, 1);
    CHECK(a.data.data == b.data.data);

    testutil::TempDir tmp("reps");
    write_reps_cache(tmp.path("reps.bin"), a);
    const LayerRepsTable c = read_reps_cache(tmp.path("reps.bin"));
    CHECK(c.n_nodes == a.n_nodes);
    CHECK(c.depth == a.depth);
    CHECK(c.dim == a.dim);
    CHECK(c.data.data == a.data.data);
}
