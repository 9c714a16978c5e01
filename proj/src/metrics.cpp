#include "gnp/metrics.hpp"

namespace gnp {

RankingMetrics recall_precision_ndcg_at_k(std::span<const std::uint32_t> ranked,
                                          const std::unordered_set<std::uint32_t>& relevant, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (relevant.empty()) throw std::invalid_argument("empty relevant set");
    const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
    std::size_t hits = 0;
    double dcg = 0.0;
    for (std::size_t r = 0; r < top; ++r) {
        if (relevant.count(ranked[r])) {
            ++hits;
            dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        }
    }
    double idcg = 0.0;
    const std::size_t ideal = std::min<std::size_t>(static_cast<std::size_t>(k), relevant.size());
    for (std::size_t r = 0; r < ideal; ++r) {
        idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
    RankingMetrics m;
    m.recall = static_cast<double>(hits) / static_cast<double>(relevant.size());
    m.precision = static_cast<double>(hits) / static_cast<double>(k);
    m.ndcg = dcg / idcg;
    return m;
}

double auc(std::span<const std::pair<double, int>> scored_pairs) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [score, label] : scored_pairs) {
        (label ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: need both classes");

    std::vector<std::size_t> order(scored_pairs.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scored_pairs[a].first < scored_pairs[b].first; });

    // Average ranks within tied groups (1-based ranks).
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scored_pairs[order[j]].first == scored_pairs[order[i]].first) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (scored_pairs[order[t]].second) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

} // namespace gnp
