#include "gnp/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace gnp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"workdir", "seed", "threads"}},
        {"data",
         {"interactions", "format", "user_features", "item_features", "feature_format",
          "normalize_features"}},
        {"split", {"cold_item_frac", "embed_frac", "model_frac"}},
        {"embedding",
         {"source", "dim", "epochs", "lr", "l2", "parallel", "user_file", "item_file", "import_format"}},
        {"walks", {"num_walks", "depth"}},
        {"train",
         {"lr", "batch_size", "l2", "tau", "n_neg_per_pos", "max_epochs", "patience", "hidden_dim",
          "mlp_depth", "model", "early_stop_warm_only"}},
        {"eval", {"k", "protocols"}},
        {"bench", {"n_users", "n_items", "dim", "feat_dim", "hidden_dim", "mlp_depth", "repeat"}},
        {"sweep", {"taus"}},
        {"synth",
         {"n_users", "n_items", "n_blocks", "in_block_prob", "cross_block_prob", "feature_dim",
          "feature_noise"}},
    };
    return s;
}

} // namespace

Ini Ini::parse_text(const std::string& text, const std::string& origin) {
    Ini ini;
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section");
            ini.sections[section]; // materialize
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected `key = value`");
        }
        if (section.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any [section]");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        ini.sections[section][key] = value;
    }
    return ini;
}

Ini Ini::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

void Ini::set(const std::string& dotted_key, const std::string& value) {
    const auto dotpos = dotted_key.find('.');
    if (dotpos == std::string::npos || dotpos == 0 || dotpos + 1 >= dotted_key.size()) {
        throw ConfigError("override must look like section.key=value, got: " + dotted_key);
    }
    sections[dotted_key.substr(0, dotpos)][dotted_key.substr(dotpos + 1)] = value;
}

bool Ini::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string Ini::get(const std::string& section, const std::string& key, const std::string& fallback) const {
    const auto s = sections.find(section);
    if (s == sections.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double Ini::get_double(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key + ": not a number: " + v);
    }
}

std::int64_t Ini::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const std::int64_t i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return i;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key + ": not an integer: " + v);
    }
}

bool Ini::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(section + "." + key + ": not a boolean: " + v);
}

std::string Ini::canonical_section(const std::string& section) const {
    std::string out = "[" + section + "]\n";
    const auto s = sections.find(section);
    if (s != sections.end()) {
        for (const auto& [k, v] : s->second) out += k + "=" + v + "\n";
    }
    return out;
}

void Ini::validate_schema() const {
    const auto& known = schema();
    for (const auto& [section, keys] : sections) {
        const auto s = known.find(section);
        if (s == known.end()) throw ConfigError("unknown config section: [" + section + "]");
        for (const auto& [key, value] : keys) {
            if (!s->second.count(key)) {
                throw ConfigError("unknown config key: " + section + "." + key);
            }
        }
    }
}

namespace {

InteractionFormat parse_interaction_format(const std::string& v) {
    if (v == "tsv") return InteractionFormat::tsv;
    if (v == "binary") return InteractionFormat::binary;
    throw ConfigError("data.format must be tsv or binary, got: " + v);
}

FeatureFormat parse_feature_format(const std::string& v) {
    if (v == "text") return FeatureFormat::text;
    if (v == "binary") return FeatureFormat::binary;
    throw ConfigError("feature_format must be text or binary, got: " + v);
}

std::vector<Protocol> parse_protocols(const std::string& v) {
    std::vector<Protocol> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "hybrid") out.push_back(Protocol::hybrid);
        else if (tok == "warm") out.push_back(Protocol::warm);
        else if (tok == "cold") out.push_back(Protocol::cold);
        else throw ConfigError("eval.protocols: unknown protocol: " + tok);
    }
    if (out.empty()) throw ConfigError("eval.protocols: empty list");
    return out;
}

std::vector<double> parse_taus(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("sweep.taus: not a number: " + tok);
        }
    }
    if (out.empty()) throw ConfigError("sweep.taus: empty list");
    return out;
}

} // namespace

RunConfig RunConfig::from_ini(Ini ini) {
    ini.validate_schema();
    RunConfig c;

    c.workdir = ini.get("run", "workdir", c.workdir);
    if (const char* env = std::getenv("GNP_WORKDIR"); env && *env) c.workdir = env;
    c.seed = static_cast<std::uint64_t>(ini.get_int("run", "seed", static_cast<std::int64_t>(c.seed)));
    c.threads = static_cast<int>(ini.get_int("run", "threads", c.threads));

    c.interactions_path = ini.get("data", "interactions", "");
    c.interactions_format = parse_interaction_format(ini.get("data", "format", "tsv"));
    c.user_features_path = ini.get("data", "user_features", "");
    c.item_features_path = ini.get("data", "item_features", "");
    c.feature_format = parse_feature_format(ini.get("data", "feature_format", "text"));
    c.normalize_features = ini.get_bool("data", "normalize_features", false);

    c.fractions.cold_item_frac = ini.get_double("split", "cold_item_frac", c.fractions.cold_item_frac);
    c.fractions.embed_frac = ini.get_double("split", "embed_frac", c.fractions.embed_frac);
    c.fractions.model_frac = ini.get_double("split", "model_frac", c.fractions.model_frac);

    c.embedding_source = ini.get("embedding", "source", c.embedding_source);
    if (c.embedding_source != "bpr" && c.embedding_source != "import") {
        throw ConfigError("embedding.source must be bpr or import");
    }
    c.embedding_dim = static_cast<std::size_t>(ini.get_int("embedding", "dim", 200));
    c.embedding_epochs = static_cast<int>(ini.get_int("embedding", "epochs", 200));
    c.embedding_lr = ini.get_double("embedding", "lr", 0.05);
    c.embedding_l2 = ini.get_double("embedding", "l2", 1e-5);
    c.embedding_parallel = ini.get_bool("embedding", "parallel", false);
    c.import_user_path = ini.get("embedding", "user_file", "");
    c.import_item_path = ini.get("embedding", "item_file", "");
    const std::string imp = ini.get("embedding", "import_format", "text");
    if (imp == "text") c.import_format = EmbeddingFormat::text;
    else if (imp == "binary") c.import_format = EmbeddingFormat::binary;
    else throw ConfigError("embedding.import_format must be text or binary");

    c.num_walks = static_cast<std::size_t>(ini.get_int("walks", "num_walks", 25));
    c.walk_depth = static_cast<std::size_t>(ini.get_int("walks", "depth", 3));
    if (c.num_walks < 1 || c.walk_depth < 1) throw ConfigError("walks: need num_walks >= 1 and depth >= 1");

    c.train.lr = ini.get_double("train", "lr", 0.001);
    c.train.batch_size = static_cast<int>(ini.get_int("train", "batch_size", 1024));
    c.train.l2 = ini.get_double("train", "l2", 1e-5);
    c.train.tau = ini.get_double("train", "tau", 0.5);
    c.train.n_neg_per_pos = static_cast<int>(ini.get_int("train", "n_neg_per_pos", 4));
    c.train.max_epochs = static_cast<int>(ini.get_int("train", "max_epochs", 100));
    c.train.patience = static_cast<int>(ini.get_int("train", "patience", 10));
    c.train.hidden_dim = static_cast<std::size_t>(ini.get_int("train", "hidden_dim", 200));
    c.train.mlp_depth = static_cast<int>(ini.get_int("train", "mlp_depth", 2));
    c.train.early_stop_warm_only = ini.get_bool("train", "early_stop_warm_only", false);
    const std::string model = ini.get("train", "model", "gnp");
    if (model == "gnp") c.train.model = ModelKind::gnp;
    else if (model == "dropoutnet") c.train.model = ModelKind::dropoutnet;
    else throw ConfigError("train.model must be gnp or dropoutnet");

    c.eval_k = static_cast<int>(ini.get_int("eval", "k", 20));
    c.protocols = parse_protocols(ini.get("eval", "protocols", "hybrid,warm,cold"));

    c.bench_users = static_cast<std::size_t>(ini.get_int("bench", "n_users", 1000));
    c.bench_items = static_cast<std::size_t>(ini.get_int("bench", "n_items", 10000));
    c.bench_dim = static_cast<std::size_t>(ini.get_int("bench", "dim", 200));
    c.bench_feat_dim = static_cast<std::size_t>(ini.get_int("bench", "feat_dim", 300));
    c.bench_hidden = static_cast<std::size_t>(ini.get_int("bench", "hidden_dim", 200));
    c.bench_mlp_depth = static_cast<int>(ini.get_int("bench", "mlp_depth", 2));
    c.bench_repeat = static_cast<int>(ini.get_int("bench", "repeat", 5));

    c.sweep_taus = parse_taus(ini.get("sweep", "taus", "0,0.25,0.5,0.75,1"));

    c.synth.n_users = static_cast<std::uint32_t>(ini.get_int("synth", "n_users", 200));
    c.synth.n_items = static_cast<std::uint32_t>(ini.get_int("synth", "n_items", 300));
    c.synth.n_blocks = static_cast<std::uint32_t>(ini.get_int("synth", "n_blocks", 4));
    c.synth.in_block_prob = ini.get_double("synth", "in_block_prob", 0.3);
    c.synth.cross_block_prob = ini.get_double("synth", "cross_block_prob", 0.01);
    c.synth.feature_dim = static_cast<std::size_t>(ini.get_int("synth", "feature_dim", 8));
    c.synth.feature_noise = ini.get_double("synth", "feature_noise", 0.05);
    c.synth.seed = 0; // derived from the master seed at generation time

    c.ini = std::move(ini);
    return c;
}

std::uint64_t stage_seed(const RunConfig& cfg, const std::string& stage) {
    return derive_seed(cfg.seed, stage);
}

} // namespace gnp
