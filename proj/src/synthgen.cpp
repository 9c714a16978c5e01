#include "gnp/synthgen.hpp"

#include "gnp/features.hpp"
#include "gnp/rng.hpp"

namespace gnp {

namespace {

MatF block_features(std::size_t n, std::uint32_t n_blocks, std::size_t dim, double noise, Rng& rng) {
    MatF f(n, dim);
    for (std::size_t e = 0; e < n; ++e) {
        auto row = f.row(e);
        row[e % n_blocks] = 1.0f;
        if (noise > 0.0) {
            for (float& v : row) v += static_cast<float>(noise * rng.gaussian());
        }
    }
    return f;
}

} // namespace

SynthData generate(const SynthSpec& spec) {
    if (spec.in_block_prob <= spec.cross_block_prob) {
        throw ConfigError("synth: in_block_prob must exceed cross_block_prob");
    }
    if (spec.in_block_prob < 0.0 || spec.in_block_prob > 1.0 || spec.cross_block_prob < 0.0 ||
        spec.cross_block_prob > 1.0) {
        throw ConfigError("synth: probabilities must be in [0,1]");
    }
    if (spec.n_blocks == 0 || spec.feature_dim < spec.n_blocks) {
        throw ConfigError("synth: need n_blocks >= 1 and feature_dim >= n_blocks");
    }

    SynthData data;
    data.user_blocks.resize(spec.n_users);
    data.item_blocks.resize(spec.n_items);
    for (std::uint32_t u = 0; u < spec.n_users; ++u) data.user_blocks[u] = u % spec.n_blocks;
    for (std::uint32_t i = 0; i < spec.n_items; ++i) data.item_blocks[i] = i % spec.n_blocks;

    Rng edge_rng(derive_seed(spec.seed, "synth-edges"));
    for (std::uint32_t u = 0; u < spec.n_users; ++u) {
        for (std::uint32_t i = 0; i < spec.n_items; ++i) {
            const double p =
                data.user_blocks[u] == data.item_blocks[i] ? spec.in_block_prob : spec.cross_block_prob;
            if (edge_rng.bernoulli(p)) data.interactions.push_back({u, i});
        }
    }

    Rng feat_rng(derive_seed(spec.seed, "synth-features"));
    data.user_features = block_features(spec.n_users, spec.n_blocks, spec.feature_dim, spec.feature_noise, feat_rng);
    data.item_features = block_features(spec.n_items, spec.n_blocks, spec.feature_dim, spec.feature_noise, feat_rng);
    return data;
}

void write_synth_files(const SynthData& data, const std::string& interactions_path,
                       const std::string& user_features_path, const std::string& item_features_path) {
    write_interactions_tsv(interactions_path, data.interactions);
    save_features(user_features_path, data.user_features, FeatureFormat::text);
    save_features(item_features_path, data.item_features, FeatureFormat::text);
}

} // namespace gnp
