#include "gnp/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace gnp {

bool id_in(const std::vector<std::uint32_t>& sorted_ids, std::uint32_t id) {
    return std::binary_search(sorted_ids.begin(), sorted_ids.end(), id);
}

DatasetSplit make_split(const std::vector<Interaction>& interactions, std::uint32_t n_users,
                        std::uint32_t n_items, const SplitFractions& f, std::uint64_t seed) {
    if (f.cold_item_frac < 0.0 || f.cold_item_frac > 1.0) throw ConfigError("cold_item_frac must be in [0,1]");
    if (f.embed_frac <= 0.0 || f.model_frac <= 0.0) throw ConfigError("split fractions must be positive");
    if (f.embed_frac + f.model_frac >= 1.0) throw ConfigError("embed_frac + model_frac must be < 1");

    DatasetSplit s;
    s.n_users = n_users;
    s.n_items = n_items;
    s.rng_seed = seed;

    Rng rng(seed);

    // Cold items: uniform draw without replacement.
    std::vector<std::uint32_t> item_ids(n_items);
    std::iota(item_ids.begin(), item_ids.end(), 0u);
    rng.shuffle(item_ids);
    const auto n_cold = static_cast<std::size_t>(std::llround(f.cold_item_frac * n_items));
    s.cold_items.assign(item_ids.begin(), item_ids.begin() + static_cast<std::ptrdiff_t>(n_cold));
    s.warm_items.assign(item_ids.begin() + static_cast<std::ptrdiff_t>(n_cold), item_ids.end());
    std::sort(s.cold_items.begin(), s.cold_items.end());
    std::sort(s.warm_items.begin(), s.warm_items.end());

    std::vector<Interaction> warm, cold;
    warm.reserve(interactions.size());
    for (const Interaction& r : interactions) {
        (id_in(s.cold_items, r.item) ? cold : warm).push_back(r);
    }

    // Warm interactions -> embed / model / validation / test by cumulative
    // rounding, so each partition lands within +-1 of its target size.
    rng.shuffle(warm);
    const auto w = static_cast<double>(warm.size());
    const auto c1 = static_cast<std::size_t>(std::llround(f.embed_frac * w));
    const auto c2 = static_cast<std::size_t>(std::llround((f.embed_frac + f.model_frac) * w));
    const double val_test = 1.0 - f.embed_frac - f.model_frac;
    const auto c3 = static_cast<std::size_t>(std::llround((f.embed_frac + f.model_frac + val_test / 2.0) * w));
    s.embed_train.assign(warm.begin(), warm.begin() + static_cast<std::ptrdiff_t>(c1));
    s.model_train.assign(warm.begin() + static_cast<std::ptrdiff_t>(c1), warm.begin() + static_cast<std::ptrdiff_t>(c2));
    s.validation.assign(warm.begin() + static_cast<std::ptrdiff_t>(c2), warm.begin() + static_cast<std::ptrdiff_t>(c3));
    s.test.assign(warm.begin() + static_cast<std::ptrdiff_t>(c3), warm.end());

    // Cold-item interactions go to validation/test only, 50/50.
    rng.shuffle(cold);
    const std::size_t cold_half = cold.size() / 2;
    for (std::size_t k = 0; k < cold.size(); ++k) {
        (k < cold_half ? s.validation : s.test).push_back(cold[k]);
    }

    // Warm users: at least one interaction with a warm item.
    std::vector<std::uint8_t> has_warm(n_users, 0), has_any(n_users, 0);
    for (const Interaction& r : interactions) {
        has_any[r.user] = 1;
        if (id_in(s.warm_items, r.item)) has_warm[r.user] = 1;
    }
    for (std::uint32_t u = 0; u < n_users; ++u) {
        if (has_warm[u]) {
            s.warm_users.push_back(u);
        } else if (has_any[u]) {
            s.warnings.push_back("user " + std::to_string(u) +
                                 " lost all interactions to cold items; excluded from warm user set");
        }
    }
    return s;
}

std::vector<Interaction> sample_negatives(const std::vector<Interaction>& positives, int n_neg_per_pos,
                                          const std::vector<std::uint32_t>& item_pool, Rng& rng,
                                          const std::vector<Interaction>& observed) {
    if (item_pool.empty()) throw DataError("sample_negatives: empty item pool");
    if (n_neg_per_pos < 1) throw ConfigError("n_neg_per_pos must be >= 1");

    const std::vector<Interaction>& seen = observed.empty() ? positives : observed;
    std::unordered_set<std::uint64_t> seen_pairs;
    seen_pairs.reserve(seen.size() * 2);
    for (const Interaction& r : seen) {
        seen_pairs.insert((static_cast<std::uint64_t>(r.user) << 32) | r.item);
    }

    constexpr int kMaxRetries = 32;
    std::vector<Interaction> negatives;
    negatives.reserve(positives.size() * static_cast<std::size_t>(n_neg_per_pos));
    for (const Interaction& pos : positives) {
        for (int k = 0; k < n_neg_per_pos; ++k) {
            std::uint32_t item = item_pool[rng.uniform_index(item_pool.size())];
            for (int retry = 0; retry < kMaxRetries; ++retry) {
                if (!seen_pairs.count((static_cast<std::uint64_t>(pos.user) << 32) | item)) break;
                item = item_pool[rng.uniform_index(item_pool.size())];
            }
            negatives.push_back({pos.user, item});
        }
    }
    return negatives;
}

} // namespace gnp
