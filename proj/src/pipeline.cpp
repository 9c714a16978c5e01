#include "gnp/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gnp/binio.hpp"
#include "gnp/graph.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace gnp {

namespace {

const std::vector<std::string>& stage_order() {
    static const std::vector<std::string> order = {"prepare", "embeddings", "walks", "train", "eval"};
    return order;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

void dump_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

} // namespace

// ---- split round trip -------------------------------------------------------

void write_split_files(const std::string& dir, const DatasetSplit& split, const Dataset& dataset,
                       std::uint64_t master_seed, const SplitFractions& fractions) {
    fs::create_directories(dir);
    write_interactions_binary(dir + "/embed_train.bin", split.embed_train);
    write_interactions_binary(dir + "/model_train.bin", split.model_train);
    write_interactions_binary(dir + "/validation.bin", split.validation);
    write_interactions_binary(dir + "/test.bin", split.test);
    write_u32_list(dir + "/warm_items.bin", split.warm_items);
    write_u32_list(dir + "/cold_items.bin", split.cold_items);
    write_u32_list(dir + "/warm_users.bin", split.warm_users);
    write_id_map(dir + "/user_map.tsv", dataset.user_names);
    write_id_map(dir + "/item_map.tsv", dataset.item_names);

    json manifest;
    manifest["master_seed"] = master_seed;
    manifest["split_seed"] = split.rng_seed;
    manifest["fractions"] = {{"cold_item_frac", fractions.cold_item_frac},
                             {"embed_frac", fractions.embed_frac},
                             {"model_frac", fractions.model_frac}};
    manifest["n_users"] = split.n_users;
    manifest["n_items"] = split.n_items;
    manifest["counts"] = {{"embed_train", split.embed_train.size()},
                          {"model_train", split.model_train.size()},
                          {"validation", split.validation.size()},
                          {"test", split.test.size()},
                          {"warm_items", split.warm_items.size()},
                          {"cold_items", split.cold_items.size()},
                          {"warm_users", split.warm_users.size()}};
    manifest["files"] = {{"embed_train", "embed_train.bin"}, {"model_train", "model_train.bin"},
                         {"validation", "validation.bin"},   {"test", "test.bin"},
                         {"warm_items", "warm_items.bin"},   {"cold_items", "cold_items.bin"},
                         {"warm_users", "warm_users.bin"},   {"user_map", "user_map.tsv"},
                         {"item_map", "item_map.tsv"}};
    manifest["warnings"] = split.warnings;
    dump_json(dir + "/manifest.json", manifest);
}

DatasetSplit read_split_files(const std::string& dir) {
    const json manifest = load_json(dir + "/manifest.json");
    DatasetSplit s;
    s.n_users = manifest.at("n_users").get<std::uint32_t>();
    s.n_items = manifest.at("n_items").get<std::uint32_t>();
    s.rng_seed = manifest.at("split_seed").get<std::uint64_t>();
    s.embed_train = read_interactions_binary(dir + "/embed_train.bin");
    s.model_train = read_interactions_binary(dir + "/model_train.bin");
    s.validation = read_interactions_binary(dir + "/validation.bin");
    s.test = read_interactions_binary(dir + "/test.bin");
    s.warm_items = read_u32_list(dir + "/warm_items.bin");
    s.cold_items = read_u32_list(dir + "/cold_items.bin");
    s.warm_users = read_u32_list(dir + "/warm_users.bin");
    return s;
}

// ---- pipeline ---------------------------------------------------------------

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.workdir.empty()) throw ConfigError("workdir must not be empty");
    fs::create_directories(cfg_.workdir);
    fs::create_directories(cfg_.workdir + "/stamps");
}

std::string Pipeline::path(const std::string& rel) const { return cfg_.workdir + "/" + rel; }

std::uint64_t Pipeline::chain_hash(const std::string& stage) const {
    std::string material;
    if (stage == "prepare") {
        material = cfg_.ini.canonical_section("data") + cfg_.ini.canonical_section("split") +
                   "seed=" + std::to_string(cfg_.seed);
    } else if (stage == "embeddings") {
        material = hex64(chain_hash("prepare")) + cfg_.ini.canonical_section("embedding");
    } else if (stage == "walks") {
        material = hex64(chain_hash("embeddings")) + cfg_.ini.canonical_section("walks");
    } else if (stage == "train") {
        material = hex64(chain_hash("walks")) + cfg_.ini.canonical_section("train");
    } else if (stage == "eval") {
        material = hex64(chain_hash("train")) + cfg_.ini.canonical_section("eval");
    } else {
        throw ConfigError("unknown stage: " + stage);
    }
    return fnv1a64(material);
}

std::vector<std::string> Pipeline::stage_outputs(const std::string& stage) const {
    if (stage == "prepare") {
        std::vector<std::string> out = {"split/manifest.json",   "split/embed_train.bin",
                                        "split/model_train.bin", "split/validation.bin",
                                        "split/test.bin",        "split/warm_items.bin",
                                        "split/cold_items.bin",  "split/warm_users.bin",
                                        "split/user_map.tsv",    "split/item_map.tsv"};
        if (!cfg_.user_features_path.empty()) out.push_back("features/user_features.bin");
        if (!cfg_.item_features_path.empty()) out.push_back("features/item_features.bin");
        return out;
    }
    if (stage == "embeddings") return {"emb/user_embeddings.bin", "emb/item_embeddings.bin"};
    if (stage == "walks") return {"reps/user_reps.bin", "reps/item_reps.bin"};
    if (stage == "train") return {"model/checkpoint.bin", "model/train_log.tsv"};
    if (stage == "eval") return {"report.json"};
    throw ConfigError("unknown stage: " + stage);
}

bool Pipeline::stage_fresh(const std::string& stage) const {
    const std::string stamp_path = path("stamps/" + stage + ".json");
    if (!file_exists(stamp_path)) return false;
    json stamp;
    try {
        stamp = load_json(stamp_path);
    } catch (const DataError&) {
        return false;
    }
    if (stamp.value("hash", "") != hex64(chain_hash(stage))) return false;
    if (!stamp.contains("outputs")) return false;
    for (const auto& [rel, recorded] : stamp.at("outputs").items()) {
        const std::string p = path(rel);
        if (!file_exists(p)) return false;
        if (hex64(hash_file(p)) != recorded.get<std::string>()) return false;
    }
    return true;
}

void Pipeline::require_fresh_upstream(const std::string& stage) const {
    for (const std::string& s : stage_order()) {
        if (s == stage) return;
        if (!stage_fresh(s)) {
            throw DataError("stage '" + s + "' is missing or stale; run `gnp " +
                            (s == "embeddings" ? std::string("train-embeddings")
                             : s == "walks"    ? std::string("precompute-walks")
                                               : s) +
                            "` or `gnp full-run` first");
        }
    }
}

void Pipeline::drop_downstream_stamps(const std::string& stage) const {
    bool past = false;
    for (const std::string& s : stage_order()) {
        if (past) fs::remove(path("stamps/" + s + ".json"));
        if (s == stage) past = true;
    }
}

void Pipeline::write_stamp(const std::string& stage) const {
    json stamp;
    stamp["stage"] = stage;
    stamp["hash"] = hex64(chain_hash(stage));
    json outputs = json::object();
    for (const std::string& rel : stage_outputs(stage)) {
        outputs[rel] = hex64(hash_file(path(rel)));
    }
    stamp["outputs"] = outputs;
    dump_json(path("stamps/" + stage + ".json"), stamp);
}

bool Pipeline::run_stage(const std::string& stage, bool (Pipeline::*impl)()) {
    if (stage_fresh(stage)) return false;
    drop_downstream_stamps(stage);
    (this->*impl)();
    write_stamp(stage);
    return true;
}

bool Pipeline::run_prepare() { return run_stage("prepare", &Pipeline::impl_prepare); }
bool Pipeline::run_embeddings() { return run_stage("embeddings", &Pipeline::impl_embeddings); }
bool Pipeline::run_walks() { return run_stage("walks", &Pipeline::impl_walks); }
bool Pipeline::run_train() { return run_stage("train", &Pipeline::impl_train); }
bool Pipeline::run_eval_stage() { return run_stage("eval", &Pipeline::impl_eval); }

// ---- stage bodies -----------------------------------------------------------

bool Pipeline::impl_prepare() {
    if (cfg_.interactions_path.empty()) throw ConfigError("data.interactions is required");
    if (!file_exists(cfg_.interactions_path)) {
        throw DataError("interactions file does not exist: " + cfg_.interactions_path);
    }
    const Dataset ds = load_interactions(cfg_.interactions_path, cfg_.interactions_format);
    const DatasetSplit split =
        make_split(ds.interactions, ds.n_users, ds.n_items, cfg_.fractions, stage_seed(cfg_, "split"));
    for (const std::string& w : split.warnings) std::cerr << "warning: " << w << '\n';
    write_split_files(path("split"), split, ds, cfg_.seed, cfg_.fractions);

    fs::create_directories(path("features"));
    const auto prepare_features = [&](const std::string& src, const std::vector<std::string>& names,
                                      const std::string& dst, const char* side) {
        if (src.empty()) return;
        if (!file_exists(src)) throw DataError(std::string(side) + " features file does not exist: " + src);
        MatF raw = load_features(src, cfg_.feature_format);
        MatF dense = remap_features(raw, names);
        if (cfg_.normalize_features) l2_normalize_rows(dense);
        save_features(dst, dense, FeatureFormat::binary);
    };
    prepare_features(cfg_.user_features_path, ds.user_names, path("features/user_features.bin"), "user");
    prepare_features(cfg_.item_features_path, ds.item_names, path("features/item_features.bin"), "item");
    return true;
}

bool Pipeline::impl_embeddings() {
    const DatasetSplit split = read_split_files(path("split"));
    EmbeddingStore store;
    if (cfg_.embedding_source == "bpr") {
        store = train_bpr_mf(split.embed_train, split.n_users, split.n_items, cfg_.embedding_dim,
                             cfg_.embedding_epochs, cfg_.embedding_lr, cfg_.embedding_l2,
                             stage_seed(cfg_, "embedding"), cfg_.embedding_parallel, cfg_.threads);
    } else {
        if (cfg_.import_user_path.empty() || cfg_.import_item_path.empty()) {
            throw ConfigError("embedding.source=import requires embedding.user_file and embedding.item_file");
        }
        store = import_embeddings(cfg_.import_user_path, cfg_.import_item_path, cfg_.import_format);
        if (store.user_embeddings.rows != split.n_users || store.item_embeddings.rows != split.n_items) {
            throw DataError("imported embedding row counts do not match the prepared split (" +
                            std::to_string(store.user_embeddings.rows) + "x" +
                            std::to_string(store.item_embeddings.rows) + " vs " +
                            std::to_string(split.n_users) + "x" + std::to_string(split.n_items) + ")");
        }
    }
    fs::create_directories(path("emb"));
    export_embeddings(path("emb/user_embeddings.bin"), path("emb/item_embeddings.bin"), store,
                      EmbeddingFormat::binary);
    return true;
}

bool Pipeline::impl_walks() {
    const DatasetSplit split = read_split_files(path("split"));
    const EmbeddingStore store =
        import_embeddings(path("emb/user_embeddings.bin"), path("emb/item_embeddings.bin"), EmbeddingFormat::binary);
    std::vector<Interaction> train_edges = split.embed_train;
    train_edges.insert(train_edges.end(), split.model_train.begin(), split.model_train.end());
    const InteractionGraph graph = build_graph(train_edges, split.n_users, split.n_items);
    const std::uint64_t seed = stage_seed(cfg_, "walks");
    const LayerRepsTable user_reps =
        precompute_layer_reps(graph, store, NodeSide::user, cfg_.num_walks, cfg_.walk_depth, seed, cfg_.threads);
    const LayerRepsTable item_reps =
        precompute_layer_reps(graph, store, NodeSide::item, cfg_.num_walks, cfg_.walk_depth, seed, cfg_.threads);
    fs::create_directories(path("reps"));
    write_reps_cache(path("reps/user_reps.bin"), user_reps);
    write_reps_cache(path("reps/item_reps.bin"), item_reps);
    return true;
}

namespace {

MatF load_feature_file_or_empty(const std::string& p) {
    if (!file_exists(p)) return {};
    return load_features(p, FeatureFormat::binary);
}

} // namespace

bool Pipeline::impl_train() {
    const DatasetSplit split = read_split_files(path("split"));
    // The dropoutnet baseline consumes raw embeddings, which are exactly the
    // depth-0 representation tables.
    const bool raw = cfg_.train.model == ModelKind::dropoutnet;
    const LayerRepsTable user_reps =
        read_reps_cache(path(raw ? "emb/user_embeddings.bin" : "reps/user_reps.bin"));
    const LayerRepsTable item_reps =
        read_reps_cache(path(raw ? "emb/item_embeddings.bin" : "reps/item_reps.bin"));
    const MatF user_features = load_feature_file_or_empty(path("features/user_features.bin"));
    const MatF item_features = load_feature_file_or_empty(path("features/item_features.bin"));

    TrainConfig tc = cfg_.train;
    tc.seed = stage_seed(cfg_, "train");
    tc.n_threads = cfg_.threads;
    TrainLog log;
    const FitInputs inputs{split, user_reps, item_reps, user_features, item_features};
    const GnpParams params = fit(inputs, tc, &log);

    fs::create_directories(path("model"));
    save_checkpoint(path("model/checkpoint.bin"), params);
    write_train_log(path("model/train_log.tsv"), log);
    return true;
}

std::vector<EvalReport> Pipeline::compute_reports() {
    const DatasetSplit split = read_split_files(path("split"));
    const GnpParams params = load_checkpoint(path("model/checkpoint.bin"));
    const bool raw = params.kind == ModelKind::dropoutnet;
    const LayerRepsTable user_reps =
        read_reps_cache(path(raw ? "emb/user_embeddings.bin" : "reps/user_reps.bin"));
    const LayerRepsTable item_reps =
        read_reps_cache(path(raw ? "emb/item_embeddings.bin" : "reps/item_reps.bin"));
    const MatF user_features = load_feature_file_or_empty(path("features/user_features.bin"));
    const MatF item_features = load_feature_file_or_empty(path("features/item_features.bin"));

    const ScoringContext ctx = build_scoring_context(params, user_reps, item_reps, user_features,
                                                     item_features, split.warm_users, split.warm_items,
                                                     cfg_.threads);
    std::vector<EvalReport> reports;
    for (Protocol p : cfg_.protocols) {
        reports.push_back(evaluate(split, ctx, p, cfg_.eval_k, cfg_.threads));
    }
    return reports;
}

bool Pipeline::impl_eval() {
    const std::vector<EvalReport> reports = compute_reports();
    // The persisted report carries only deterministic fields; timings are
    // printed by the eval command instead.
    json j;
    j["k"] = cfg_.eval_k;
    json protocols = json::object();
    for (const EvalReport& r : reports) {
        protocols[protocol_name(r.protocol)] = {{"recall", r.recall},
                                                {"precision", r.precision},
                                                {"ndcg", r.ndcg},
                                                {"auc", r.auc},
                                                {"n_users_evaluated", r.n_users_evaluated}};
    }
    j["protocols"] = protocols;
    dump_json(path("report.json"), j);
    return true;
}

void Pipeline::full_run(std::ostream& log) {
    const struct {
        const char* name;
        bool (Pipeline::*fn)();
    } stages[] = {{"prepare", &Pipeline::run_prepare},
                  {"embeddings", &Pipeline::run_embeddings},
                  {"walks", &Pipeline::run_walks},
                  {"train", &Pipeline::run_train},
                  {"eval", &Pipeline::run_eval_stage}};
    for (const auto& s : stages) {
        try {
            const bool executed = (this->*(s.fn))();
            log << "[" << s.name << "] " << (executed ? "run" : "cached") << '\n';
        } catch (...) {
            log << "[" << s.name << "] failed\n";
            throw;
        }
    }
}

void Pipeline::sweep_tau(std::ostream& tsv_out, std::ostream& log) {
    run_prepare();
    run_embeddings();
    run_walks();

    const DatasetSplit split = read_split_files(path("split"));
    const bool raw = cfg_.train.model == ModelKind::dropoutnet;
    const LayerRepsTable user_reps =
        read_reps_cache(path(raw ? "emb/user_embeddings.bin" : "reps/user_reps.bin"));
    const LayerRepsTable item_reps =
        read_reps_cache(path(raw ? "emb/item_embeddings.bin" : "reps/item_reps.bin"));
    const MatF user_features = load_feature_file_or_empty(path("features/user_features.bin"));
    const MatF item_features = load_feature_file_or_empty(path("features/item_features.bin"));

    tsv_out << "tau\tstatus";
    for (const char* proto : {"hybrid", "warm", "cold"}) {
        tsv_out << '\t' << proto << "_recall\t" << proto << "_precision\t" << proto << "_ndcg\t" << proto
                << "_auc";
    }
    tsv_out << '\n';
    tsv_out.precision(10);

    for (double tau : cfg_.sweep_taus) {
        TrainConfig tc = cfg_.train;
        tc.tau = tau;
        tc.seed = stage_seed(cfg_, "train");
        tc.n_threads = cfg_.threads;
        try {
            TrainLog tl;
            const FitInputs inputs{split, user_reps, item_reps, user_features, item_features};
            const GnpParams params = fit(inputs, tc, &tl);
            const ScoringContext ctx =
                build_scoring_context(params, user_reps, item_reps, user_features, item_features,
                                      split.warm_users, split.warm_items, cfg_.threads);
            tsv_out << tau << "\tok";
            for (Protocol p : {Protocol::hybrid, Protocol::warm, Protocol::cold}) {
                const EvalReport r = evaluate(split, ctx, p, cfg_.eval_k, cfg_.threads);
                tsv_out << '\t' << r.recall << '\t' << r.precision << '\t' << r.ndcg << '\t' << r.auc;
            }
            tsv_out << '\n';
            log << "[sweep] tau=" << tau << " done (best epoch " << tl.best_epoch << ")\n";
        } catch (const NumericError& e) {
            tsv_out << tau << "\tfailed";
            for (int i = 0; i < 12; ++i) tsv_out << "\tnan";
            tsv_out << '\n';
            log << "[sweep] tau=" << tau << " failed: " << e.what() << '\n';
        }
    }
}

BenchReport Pipeline::run_bench() const {
    const BenchContext ctx =
        make_synthetic_bench(cfg_.bench_users, cfg_.bench_items, cfg_.bench_dim, cfg_.bench_feat_dim,
                             cfg_.bench_hidden, cfg_.bench_mlp_depth, stage_seed(cfg_, "bench"));
    return bench_inference(ctx, cfg_.bench_users, cfg_.bench_repeat, cfg_.threads);
}

void Pipeline::run_synth(std::ostream& log) const {
    if (cfg_.interactions_path.empty() || cfg_.user_features_path.empty() ||
        cfg_.item_features_path.empty()) {
        throw ConfigError("synth needs data.interactions, data.user_features and data.item_features paths");
    }
    SynthSpec spec = cfg_.synth;
    spec.seed = stage_seed(cfg_, "synth");
    const SynthData data = generate(spec);
    write_synth_files(data, cfg_.interactions_path, cfg_.user_features_path, cfg_.item_features_path);
    log << "[synth] wrote " << data.interactions.size() << " interactions over " << spec.n_users
        << " users x " << spec.n_items << " items (" << spec.n_blocks << " blocks)\n";
}

} // namespace gnp
