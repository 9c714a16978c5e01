#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/interactions.hpp"
#include "gnp/rng.hpp"

namespace gnp {

// Cold/warm dataset split. Cold items are sampled uniformly; the remaining
// (warm-item) interactions are partitioned by interaction into
// embed_train / model_train / validation / test, and interactions touching a
// cold item are split between validation and test only.
struct DatasetSplit {
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;
    std::vector<std::uint32_t> warm_items; // sorted
    std::vector<std::uint32_t> cold_items; // sorted
    std::vector<std::uint32_t> warm_users; // sorted; users with >= 1 warm interaction
    std::vector<Interaction> embed_train;
    std::vector<Interaction> model_train;
    std::vector<Interaction> validation;
    std::vector<Interaction> test;
    std::uint64_t rng_seed = 0;
    std::vector<std::string> warnings; // e.g. users that lost every interaction to cold items
};

struct SplitFractions {
    double cold_item_frac = 0.2;
    double embed_frac = 0.65;
    double model_frac = 0.15;
};

// Deterministic for fixed (interactions, fractions, seed). The leftover
// 1 - embed - model share of warm interactions is split 50/50 into
// validation/test, as are the cold-item interactions.
DatasetSplit make_split(const std::vector<Interaction>& interactions, std::uint32_t n_users,
                        std::uint32_t n_items, const SplitFractions& fractions, std::uint64_t seed);

// For each positive emits n_neg_per_pos (user, random pool item) pairs,
// rejecting items observed for that user (bounded retries, then accept).
// `observed` defaults to the positives themselves when empty.
std::vector<Interaction> sample_negatives(const std::vector<Interaction>& positives, int n_neg_per_pos,
                                          const std::vector<std::uint32_t>& item_pool, Rng& rng,
                                          const std::vector<Interaction>& observed = {});

// Membership helper over the sorted id vectors above.
bool id_in(const std::vector<std::uint32_t>& sorted_ids, std::uint32_t id);

} // namespace gnp
