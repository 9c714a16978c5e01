#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "gnp/embedding.hpp"
#include "gnp/kernels.hpp"
#include "gnp/rng.hpp"
#include "test_util.hpp"

using namespace gnp;

namespace {

double score(const EmbeddingStore& s, std::uint32_t u, std::uint32_t i) {
    double out = 0.0;
    for (std::size_t f = 0; f < s.dim; ++f) {
        out += static_cast<double>(s.user_embeddings.at(u, f)) * s.item_embeddings.at(i, f);
    }
    return out;
}

// Mean BPR negative log-likelihood over fixed (u, pos, neg) triples.
double mean_nll(const EmbeddingStore& s, const std::vector<std::array<std::uint32_t, 3>>& triples) {
    double nll = 0.0;
    for (const auto& [u, i, j] : triples) {
        const double margin = score(s, u, i) - score(s, u, j);
        nll += std::log(1.0 + std::exp(-margin));
    }
    return nll / static_cast<double>(triples.size());
}

} // namespace

TEST_CASE("zero epochs returns the initialization, bounds respected") {
    const std::vector<Interaction> data = {{0, 0}, {1, 1}};
    const EmbeddingStore trained = train_bpr_mf(data, 2, 2, 8, 0, 0.05, 1e-5, 123);
    const EmbeddingStore init = init_embeddings(2, 2, 8, derive_seed(123, "bpr-init"));
    CHECK(trained.user_embeddings.data == init.user_embeddings.data);
    CHECK(trained.item_embeddings.data == init.item_embeddings.data);

    const double bound = 1.0 / std::sqrt(8.0);
    for (float v : init.user_embeddings.data) {
        CHECK(v >= -bound);
        CHECK(v <= bound);
    }
    CHECK(init.user_trained == std::vector<std::uint8_t>(2, 0));
}

TEST_CASE("training separates a 2x2 diagonal preference structure") {
    const std::vector<Interaction> data = {{0, 0}, {1, 1}};
    const EmbeddingStore s = train_bpr_mf(data, 2, 2, 8, 400, 0.1, 1e-4, 7);
    CHECK(score(s, 0, 0) > score(s, 0, 1));
    CHECK(score(s, 1, 1) > score(s, 1, 0));
    CHECK(s.user_trained == std::vector<std::uint8_t>(2, 1));
}

TEST_CASE("one BPR step matches the hand-computed update") {
    EmbeddingStore s = init_embeddings(1, 2, 4, 99);
    const std::vector<float> eu(s.user_embeddings.row(0).begin(), s.user_embeddings.row(0).end());
    const std::vector<float> ei(s.item_embeddings.row(0).begin(), s.item_embeddings.row(0).end());
    const std::vector<float> ej(s.item_embeddings.row(1).begin(), s.item_embeddings.row(1).end());
    const double lr = 0.03, l2 = 0.01;

    double margin = 0.0;
    for (int f = 0; f < 4; ++f) margin += eu[f] * (double(ei[f]) - double(ej[f]));
    const double slope = 1.0 - 1.0 / (1.0 + std::exp(-margin)); // sigmoid complement

    bpr_update(s, 0, 0, 1, lr, l2);
    for (int f = 0; f < 4; ++f) {
        const double want_u = eu[f] + lr * (slope * (double(ei[f]) - double(ej[f])) - l2 * eu[f]);
        const double want_i = ei[f] + lr * (slope * eu[f] - l2 * ei[f]);
        const double want_j = ej[f] + lr * (-slope * eu[f] - l2 * ej[f]);
        CHECK(std::abs(s.user_embeddings.at(0, f) - want_u) < 1e-6);
        CHECK(std::abs(s.item_embeddings.at(0, f) - want_i) < 1e-6);
        CHECK(std::abs(s.item_embeddings.at(1, f) - want_j) < 1e-6);
    }
}

TEST_CASE("epoch-averaged BPR loss is non-increasing within 5% across 5 seeds") {
    // Small diagonal-block dataset.
    std::vector<Interaction> data;
    for (std::uint32_t u = 0; u < 12; ++u) {
        for (std::uint32_t i = 0; i < 16; ++i) {
            if (u % 4 == i % 4) data.push_back({u, i});
        }
    }
    std::vector<std::array<std::uint32_t, 3>> triples;
    Rng trng(55);
    for (const Interaction& r : data) {
        std::uint32_t j = static_cast<std::uint32_t>(trng.uniform_index(16));
        while (j % 4 == r.user % 4) j = static_cast<std::uint32_t>(trng.uniform_index(16));
        triples.push_back({r.user, r.item, j});
    }
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        double prev = 1e300;
        for (int epochs = 0; epochs <= 12; epochs += 3) {
            const EmbeddingStore s = train_bpr_mf(data, 12, 16, 8, epochs, 0.05, 1e-5, seed);
            const double nll = mean_nll(s, triples);
            CHECK(nll <= prev * 1.05);
            prev = nll;
        }
    }
}

TEST_CASE("divergence is reported as a numeric error") {
    const std::vector<Interaction> data = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    CHECK_THROWS_AS(train_bpr_mf(data, 2, 2, 4, 200, 1e12, 0.0, 3), NumericError);
}

TEST_CASE("text embedding files round trip bitwise and flag missing rows") {
    testutil::TempDir tmp("emb");
    EmbeddingStore s = init_embeddings(3, 4, 5, 31);
    export_embeddings(tmp.path("u.txt"), tmp.path("i.txt"), s, EmbeddingFormat::text);
    const EmbeddingStore back = import_embeddings(tmp.path("u.txt"), tmp.path("i.txt"), EmbeddingFormat::text);
    CHECK(back.dim == 5);
    CHECK(back.user_embeddings.data == s.user_embeddings.data);
    CHECK(back.item_embeddings.data == s.item_embeddings.data);

    // Sparse file: row 1 of 3 missing -> zero and untrained.
    testutil::write_file(tmp.path("sparse.txt"), "3 2\n0 0.5 -1.5\n2 2.25 0.125\n");
    testutil::write_file(tmp.path("items.txt"), "2 2\n0 1 2\n1 3 4\n");
    const EmbeddingStore sp = import_embeddings(tmp.path("sparse.txt"), tmp.path("items.txt"), EmbeddingFormat::text);
    CHECK(sp.user_embeddings.at(0, 0) == 0.5f);
    CHECK(sp.user_embeddings.at(1, 0) == 0.0f);
    CHECK(sp.user_embeddings.at(1, 1) == 0.0f);
    CHECK(sp.user_embeddings.at(2, 1) == 0.125f);
    CHECK(sp.user_trained == std::vector<std::uint8_t>{1, 0, 1});
}

TEST_CASE("binary embedding files round trip bitwise") {
    testutil::TempDir tmp("emb");
    EmbeddingStore s = init_embeddings(6, 2, 3, 41);
    export_embeddings(tmp.path("u.bin"), tmp.path("i.bin"), s, EmbeddingFormat::binary);
    const EmbeddingStore back = import_embeddings(tmp.path("u.bin"), tmp.path("i.bin"), EmbeddingFormat::binary);
    CHECK(back.user_embeddings.data == s.user_embeddings.data);
    CHECK(back.item_embeddings.data == s.item_embeddings.data);
}

TEST_CASE("user/item dimension mismatch is a hard error") {
    testutil::TempDir tmp("emb");
    testutil::write_file(tmp.path("u.txt"), "1 2\n0 1 2\n");
    testutil::write_file(tmp.path("i.txt"), "1 3\n0 1 2 3\n");
    CHECK_THROWS_AS(import_embeddings(tmp.path("u.txt"), tmp.path("i.txt"), EmbeddingFormat::text), DataError);
}
