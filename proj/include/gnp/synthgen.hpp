#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/common.hpp"
#include "gnp/interactions.hpp"

namespace gnp {

// Block-structured synthetic dataset: entities are assigned to blocks
// round-robin, in-block pairs interact with in_block_prob and cross-block
// pairs with cross_block_prob, and features are a noisy one-hot block
// indicator. Feature similarity therefore predicts interaction structure,
// which is what makes cold entities recoverable from features alone.
struct SynthSpec {
    std::uint32_t n_users = 200;
    std::uint32_t n_items = 300;
    std::uint32_t n_blocks = 4;
    double in_block_prob = 0.3;
    double cross_block_prob = 0.01;
    std::size_t feature_dim = 8; // >= n_blocks
    double feature_noise = 0.05;
    std::uint64_t seed = 0;
};

struct SynthData {
    std::vector<Interaction> interactions;
    MatF user_features;
    MatF item_features;
    std::vector<std::uint32_t> user_blocks;
    std::vector<std::uint32_t> item_blocks;
};

SynthData generate(const SynthSpec& spec);

// Writes interactions as TSV plus both feature files in text format,
// the same layouts the ingestion side consumes.
void write_synth_files(const SynthData& data, const std::string& interactions_path,
                       const std::string& user_features_path, const std::string& item_features_path);

} // namespace gnp
