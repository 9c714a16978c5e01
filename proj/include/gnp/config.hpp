#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gnp/embedding.hpp"
#include "gnp/eval.hpp"
#include "gnp/features.hpp"
#include "gnp/split.hpp"
#include "gnp/synthgen.hpp"
#include "gnp/train.hpp"

namespace gnp {

// Flat sectioned key=value config. `#` and `;` start comments; values keep
// inner whitespace. Section and key names are validated against the known
// schema so typos fail fast.
struct Ini {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static Ini parse_file(const std::string& path);
    static Ini parse_text(const std::string& text, const std::string& origin = "<text>");

    // Dotted override, e.g. set("train.lr", "0.001").
    void set(const std::string& dotted_key, const std::string& value);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    // Sorted `key=value` lines for one section; stage hashes are built on this.
    std::string canonical_section(const std::string& section) const;

    void validate_schema() const;
};

// Fully materialized run configuration (defaults from the experiment
// protocol; every field can be overridden from the config file or CLI).
struct RunConfig {
    Ini ini;

    std::string workdir = "gnp_work";
    std::uint64_t seed = 42;
    int threads = 1;

    // [data]
    std::string interactions_path;
    InteractionFormat interactions_format = InteractionFormat::tsv;
    std::string user_features_path;
    std::string item_features_path;
    FeatureFormat feature_format = FeatureFormat::text;
    bool normalize_features = false;

    // [split]
    SplitFractions fractions;

    // [embedding]
    std::string embedding_source = "bpr"; // bpr | import
    std::size_t embedding_dim = 200;
    int embedding_epochs = 200;
    double embedding_lr = 0.05;
    double embedding_l2 = 1e-5;
    bool embedding_parallel = false;
    std::string import_user_path;
    std::string import_item_path;
    EmbeddingFormat import_format = EmbeddingFormat::text;

    // [walks]
    std::size_t num_walks = 25; // S
    std::size_t walk_depth = 3; // K

    // [train]
    TrainConfig train;

    // [eval]
    int eval_k = 20;
    std::vector<Protocol> protocols = {Protocol::hybrid, Protocol::warm, Protocol::cold};

    // [bench]
    std::size_t bench_users = 1000;
    std::size_t bench_items = 10000;
    std::size_t bench_dim = 200;
    std::size_t bench_feat_dim = 300;
    std::size_t bench_hidden = 200;
    int bench_mlp_depth = 2;
    int bench_repeat = 5;

    // [sweep]
    std::vector<double> sweep_taus = {0.0, 0.25, 0.5, 0.75, 1.0};

    // [synth]
    SynthSpec synth;

    static RunConfig from_ini(Ini ini);
};

std::uint64_t stage_seed(const RunConfig& cfg, const std::string& stage);

} // namespace gnp
