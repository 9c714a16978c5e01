#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/common.hpp"
#include "gnp/interactions.hpp"

namespace gnp {

// Pre-trained warm embeddings. Rows exist for every entity; entities never
// touched by training keep their initialization and are flagged untrained.
struct EmbeddingStore {
    MatF user_embeddings;
    MatF item_embeddings;
    std::size_t dim = 0;
    std::vector<std::uint8_t> user_trained;
    std::vector<std::uint8_t> item_trained;

    std::span<const float> embedding(NodeRef node) const {
        return node.side == NodeSide::user ? user_embeddings.row(node.id) : item_embeddings.row(node.id);
    }
};

enum class EmbeddingFormat { text, binary };

// Uniform init in [-1/sqrt(d), +1/sqrt(d)], all rows flagged untrained.
EmbeddingStore init_embeddings(std::uint32_t n_users, std::uint32_t n_items, std::size_t dim, std::uint64_t seed);

// One BPR-SGD step on the triple (user, positive item, negative item):
// maximizes ln sigmoid(e_u.e_i - e_u.e_j) with l2 shrinkage on the touched rows.
void bpr_update(EmbeddingStore& store, std::uint32_t user, std::uint32_t pos_item, std::uint32_t neg_item,
                double lr, double l2);

// Pairwise-ranking matrix factorization over the embedding-training
// interactions. Negatives are drawn from the items present in embed_train.
// `parallel` enables lock-free (Hogwild-style) updates: races are tolerated
// and results become seed- and schedule-dependent.
EmbeddingStore train_bpr_mf(const std::vector<Interaction>& embed_train, std::uint32_t n_users,
                            std::uint32_t n_items, std::size_t dim, int epochs, double lr, double l2,
                            std::uint64_t seed, bool parallel = false, int n_threads = 1);

// Text format: header `rows dim`, then `index v1 ... vd` per line; indices may
// be sparse, missing rows stay zero and untrained.
// Binary format: the layer-reps cache layout with depth 0 (see reps.hpp).
EmbeddingStore import_embeddings(const std::string& user_path, const std::string& item_path,
                                 EmbeddingFormat format);
void export_embeddings(const std::string& user_path, const std::string& item_path,
                       const EmbeddingStore& store, EmbeddingFormat format);

} // namespace gnp
