#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace gnp {

struct RankingMetrics {
    double recall = 0.0;
    double precision = 0.0;
    double ndcg = 0.0;
};

// recall = |top-k ∩ relevant| / |relevant|, precision = .. / k,
// ndcg = DCG@k / IDCG@k with unit gains and 1/log2(rank+1) discounts.
RankingMetrics recall_precision_ndcg_at_k(std::span<const std::uint32_t> ranked,
                                          const std::unordered_set<std::uint32_t>& relevant, int k);

// Probability a random positive outscores a random negative, ties counted
// one half (rank-sum form). Throws std::invalid_argument on single-class input.
double auc(std::span<const std::pair<double, int>> scored_pairs);

// Candidates minus `exclude`, sorted by score descending with ascending-id
// tie-breaking.
template <typename ScoreFn>
std::vector<std::uint32_t> rank_all(std::span<const std::uint32_t> candidates,
                                    const std::unordered_set<std::uint32_t>& exclude, ScoreFn&& score) {
    std::vector<std::pair<double, std::uint32_t>> scored;
    scored.reserve(candidates.size());
    for (std::uint32_t id : candidates) {
        if (exclude.count(id)) continue;
        scored.emplace_back(score(id), id);
    }
    if (scored.empty()) throw std::invalid_argument("rank_all: no candidates left after exclusion");
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::uint32_t> ranked(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) ranked[i] = scored[i].second;
    return ranked;
}

} // namespace gnp
