#include "gnp/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "gnp/kernels.hpp"
#include "gnp/reps.hpp"
#include "gnp/rng.hpp"

namespace gnp {

EmbeddingStore init_embeddings(std::uint32_t n_users, std::uint32_t n_items, std::size_t dim,
                               std::uint64_t seed) {
    if (dim < 1) throw ConfigError("embedding dim must be >= 1");
    EmbeddingStore s;
    s.dim = dim;
    s.user_embeddings = MatF(n_users, dim);
    s.item_embeddings = MatF(n_items, dim);
    s.user_trained.assign(n_users, 0);
    s.item_trained.assign(n_items, 0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    Rng rng(seed);
    for (float& v : s.user_embeddings.data) v = static_cast<float>(rng.uniform(-bound, bound));
    for (float& v : s.item_embeddings.data) v = static_cast<float>(rng.uniform(-bound, bound));
    return s;
}

void bpr_update(EmbeddingStore& store, std::uint32_t user, std::uint32_t pos_item, std::uint32_t neg_item,
                double lr, double l2) {
    auto eu = store.user_embeddings.row(user);
    auto ei = store.item_embeddings.row(pos_item);
    auto ej = store.item_embeddings.row(neg_item);
    double margin = 0.0;
    for (std::size_t f = 0; f < store.dim; ++f) {
        margin += static_cast<double>(eu[f]) * (static_cast<double>(ei[f]) - static_cast<double>(ej[f]));
    }
    const double slope = 1.0 / (1.0 + std::exp(margin)); // sigmoid(-margin)
    for (std::size_t f = 0; f < store.dim; ++f) {
        const double w = eu[f], hi = ei[f], hj = ej[f];
        eu[f] = static_cast<float>(w + lr * (slope * (hi - hj) - l2 * w));
        ei[f] = static_cast<float>(hi + lr * (slope * w - l2 * hi));
        ej[f] = static_cast<float>(hj + lr * (-slope * w - l2 * hj));
    }
}

namespace {

struct PosIndex {
    std::vector<std::uint32_t> item_pool; // distinct items in embed_train
    std::unordered_set<std::uint64_t> pairs;

    bool has(std::uint32_t u, std::uint32_t i) const {
        return pairs.count((static_cast<std::uint64_t>(u) << 32) | i) != 0;
    }
};

PosIndex index_positives(const std::vector<Interaction>& embed_train) {
    PosIndex idx;
    idx.pairs.reserve(embed_train.size() * 2);
    std::unordered_set<std::uint32_t> items;
    for (const Interaction& r : embed_train) {
        idx.pairs.insert((static_cast<std::uint64_t>(r.user) << 32) | r.item);
        items.insert(r.item);
    }
    idx.item_pool.assign(items.begin(), items.end());
    std::sort(idx.item_pool.begin(), idx.item_pool.end());
    return idx;
}

std::uint32_t draw_negative(const PosIndex& idx, std::uint32_t user, Rng& rng) {
    constexpr int kMaxRetries = 32;
    std::uint32_t j = idx.item_pool[rng.uniform_index(idx.item_pool.size())];
    for (int r = 0; r < kMaxRetries && idx.has(user, j); ++r) {
        j = idx.item_pool[rng.uniform_index(idx.item_pool.size())];
    }
    return j;
}

void check_finite(const EmbeddingStore& store, int epoch) {
    for (float v : store.user_embeddings.data) {
        if (!std::isfinite(v)) {
            throw NumericError("BPR training diverged at epoch " + std::to_string(epoch) +
                               " (non-finite embedding; learning rate too high?)");
        }
    }
    for (float v : store.item_embeddings.data) {
        if (!std::isfinite(v)) {
            throw NumericError("BPR training diverged at epoch " + std::to_string(epoch) +
                               " (non-finite embedding; learning rate too high?)");
        }
    }
}

} // namespace

EmbeddingStore train_bpr_mf(const std::vector<Interaction>& embed_train, std::uint32_t n_users,
                            std::uint32_t n_items, std::size_t dim, int epochs, double lr, double l2,
                            std::uint64_t seed, bool parallel, int n_threads) {
    EmbeddingStore store = init_embeddings(n_users, n_items, dim, derive_seed(seed, "bpr-init"));
    if (embed_train.empty() || epochs <= 0) return store;

    const PosIndex idx = index_positives(embed_train);
    std::vector<std::uint32_t> order(embed_train.size());
    std::iota(order.begin(), order.end(), 0u);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng epoch_rng(derive_seed(seed, "bpr-epoch", static_cast<std::uint64_t>(epoch)));
        epoch_rng.shuffle(order);
        if (!parallel) {
            for (std::uint32_t k : order) {
                const Interaction& pos = embed_train[k];
                bpr_update(store, pos.user, pos.item, draw_negative(idx, pos.user, epoch_rng), lr, l2);
            }
        } else {
            // Hogwild-style: unsynchronized updates, races tolerated, result
            // depends on the schedule. Only the deterministic serial path is
            // used when reproducibility matters.
            parallel_for(order.size(), n_threads, [&](std::size_t t) {
                Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch) * 0x10001u, t));
                const Interaction& pos = embed_train[order[t]];
                bpr_update(store, pos.user, pos.item, draw_negative(idx, pos.user, rng), lr, l2);
            });
        }
        check_finite(store, epoch);
    }

    for (const Interaction& r : embed_train) {
        store.user_trained[r.user] = 1;
        store.item_trained[r.item] = 1;
    }
    return store;
}

namespace {

MatF load_text_embedding(const std::string& path, std::vector<std::uint8_t>& trained) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding file: " + path);
    std::size_t rows = 0, dim = 0;
    if (!(in >> rows >> dim)) throw DataError(path + ": missing `rows dim` header");
    if (dim == 0) throw DataError(path + ": embedding dim must be > 0");
    MatF m(rows, dim);
    trained.assign(rows, 0);
    std::size_t index = 0;
    while (in >> index) {
        if (index >= rows) throw DataError(path + ": row index " + std::to_string(index) + " out of range");
        auto row = m.row(index);
        for (std::size_t j = 0; j < dim; ++j) {
            if (!(in >> row[j])) throw DataError(path + ": truncated row " + std::to_string(index));
        }
        trained[index] = 1;
    }
    return m;
}

void save_text_embedding(const std::string& path, const MatF& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << m.rows << ' ' << m.cols << '\n';
    out.precision(9);
    for (std::size_t i = 0; i < m.rows; ++i) {
        out << i;
        for (float v : m.row(i)) out << ' ' << v;
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

} // namespace

EmbeddingStore import_embeddings(const std::string& user_path, const std::string& item_path,
                                 EmbeddingFormat format) {
    EmbeddingStore s;
    if (format == EmbeddingFormat::text) {
        s.user_embeddings = load_text_embedding(user_path, s.user_trained);
        s.item_embeddings = load_text_embedding(item_path, s.item_trained);
    } else {
        const LayerRepsTable u = read_reps_cache(user_path);
        const LayerRepsTable i = read_reps_cache(item_path);
        if (u.depth != 0 || i.depth != 0) throw DataError("embedding binary must have depth 0");
        s.user_embeddings = u.data;
        s.item_embeddings = i.data;
        s.user_trained.assign(u.n_nodes, 1);
        s.item_trained.assign(i.n_nodes, 1);
    }
    if (s.user_embeddings.cols != s.item_embeddings.cols) {
        throw DataError("embedding dim mismatch: users " + std::to_string(s.user_embeddings.cols) +
                        " vs items " + std::to_string(s.item_embeddings.cols));
    }
    s.dim = s.user_embeddings.cols;
    for (float v : s.user_embeddings.data) {
        if (!std::isfinite(v)) throw DataError(user_path + ": non-finite embedding value");
    }
    for (float v : s.item_embeddings.data) {
        if (!std::isfinite(v)) throw DataError(item_path + ": non-finite embedding value");
    }
    return s;
}

void export_embeddings(const std::string& user_path, const std::string& item_path,
                       const EmbeddingStore& store, EmbeddingFormat format) {
    if (format == EmbeddingFormat::text) {
        save_text_embedding(user_path, store.user_embeddings);
        save_text_embedding(item_path, store.item_embeddings);
    } else {
        LayerRepsTable u(store.user_embeddings.rows, 0, store.dim);
        u.data = store.user_embeddings;
        LayerRepsTable i(store.item_embeddings.rows, 0, store.dim);
        i.data = store.item_embeddings;
        write_reps_cache(user_path, u);
        write_reps_cache(item_path, i);
    }
}

} // namespace gnp
