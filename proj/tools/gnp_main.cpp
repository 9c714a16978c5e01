// gnp: cold-start recommender pipeline driver.
//
// Usage: gnp <command> [--config FILE] [--workdir DIR] [--threads N]
//            [--seed S] [--json] [--section.key=value ...]
//
// Commands: synth, prepare, train-embeddings, import-embeddings,
//           precompute-walks, train, eval, bench, sweep-tau, full-run.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnp/pipeline.hpp"

using json = nlohmann::json;

namespace {

struct CliArgs {
    std::string command;
    std::string config_path;
    std::string cli_workdir; // explicit flag, wins over GNP_WORKDIR
    bool json_output = false;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void print_usage(std::ostream& out) {
    out << "usage: gnp <command> [options] [--section.key=value ...]\n"
           "\n"
           "commands:\n"
           "  synth              write a synthetic block-structured fixture to the [data] paths\n"
           "  prepare            ingest interactions, build the cold/warm split and feature caches\n"
           "  train-embeddings   train BPR-MF warm embeddings on the embed partition\n"
           "  import-embeddings  import externally trained embeddings instead\n"
           "  precompute-walks   sample walks and cache pooled layer representations\n"
           "  train              train the model (gnp or dropoutnet) with AUC early stopping\n"
           "  eval               all-ranking evaluation (hybrid / warm / cold)\n"
           "  bench              inference-path latency benchmark on synthetic data\n"
           "  sweep-tau          full train+eval per dropout ratio tau\n"
           "  full-run           run every stage in order with caching\n"
           "\n"
           "options:\n"
           "  --config FILE      INI-style config (flat sections, key = value)\n"
           "  --workdir DIR      working directory (beats GNP_WORKDIR and the config)\n"
           "  --threads N        worker threads; 1 = deterministic serial path\n"
           "  --seed S           master seed\n"
           "  --json             machine-readable output (eval, bench)\n"
           "  --section.key=val  override any config value, e.g. --train.lr=0.001\n";
}

CliArgs parse_args(int argc, char** argv) {
    CliArgs args;
    if (argc < 2) throw gnp::ConfigError("missing command; try `gnp --help`");
    args.command = argv[1];
    if (args.command == "--help" || args.command == "-h" || args.command == "help") {
        print_usage(std::cout);
        std::exit(0);
    }
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        const auto need_value = [&](const char* flag) -> std::string {
            if (i + 1 >= argc) throw gnp::ConfigError(std::string(flag) + " needs a value");
            return argv[++i];
        };
        if (a == "--config") {
            args.config_path = need_value("--config");
        } else if (a == "--workdir") {
            args.cli_workdir = need_value("--workdir");
        } else if (a == "--threads") {
            args.overrides.emplace_back("run.threads", need_value("--threads"));
        } else if (a == "--seed") {
            args.overrides.emplace_back("run.seed", need_value("--seed"));
        } else if (a == "--json") {
            args.json_output = true;
        } else if (a.rfind("--", 0) == 0 && a.find('=') != std::string::npos) {
            const auto eq = a.find('=');
            args.overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
        } else {
            throw gnp::ConfigError("unrecognized argument: " + a);
        }
    }
    return args;
}

gnp::RunConfig build_config(const CliArgs& args) {
    gnp::Ini ini;
    if (!args.config_path.empty()) ini = gnp::Ini::parse_file(args.config_path);
    for (const auto& [key, value] : args.overrides) ini.set(key, value);
    gnp::RunConfig cfg = gnp::RunConfig::from_ini(std::move(ini));
    if (!args.cli_workdir.empty()) cfg.workdir = args.cli_workdir;
    return cfg;
}

void print_bench(const gnp::BenchReport& r, bool as_json, std::ostream& out) {
    if (as_json) {
        json j;
        j["n_users"] = r.n_users;
        j["n_items"] = r.n_items;
        j["repeat"] = r.repeat;
        j["warm_path_ms"] = r.warm_path_ms;
        j["mlp_path_ms"] = r.mlp_path_ms;
        j["warm_median_ms"] = r.warm_median_ms;
        j["mlp_median_ms"] = r.mlp_median_ms;
        out << j.dump(2) << '\n';
        return;
    }
    out << "inference bench: " << r.n_users << " users x " << r.n_items << " items, " << r.repeat
        << " repeats\n";
    out << "  warm path (precomputed reps + dot products): median " << r.warm_median_ms << " ms\n";
    out << "  mlp path  (tower forward + dot products):    median " << r.mlp_median_ms << " ms\n";
    out << "  samples warm:";
    for (double v : r.warm_path_ms) out << ' ' << v;
    out << "\n  samples mlp: ";
    for (double v : r.mlp_path_ms) out << ' ' << v;
    out << '\n';
}

void print_eval_reports(const std::vector<gnp::EvalReport>& reports, bool as_json, std::ostream& out) {
    if (as_json) {
        for (const gnp::EvalReport& r : reports) {
            json j;
            j["protocol"] = gnp::protocol_name(r.protocol);
            j["k"] = r.k;
            j["recall"] = r.recall;
            j["precision"] = r.precision;
            j["ndcg"] = r.ndcg;
            j["auc"] = r.auc;
            j["n_users_evaluated"] = r.n_users_evaluated;
            j["wall_time_ms"] = r.wall_time_ms;
            out << j.dump() << '\n';
        }
        return;
    }
    gnp::print_report_tsv(out, reports);
    gnp::print_report_table(out, reports);
}

int run_command(const CliArgs& args) {
    gnp::RunConfig cfg = build_config(args);
    if (args.command == "import-embeddings") cfg.embedding_source = "import";
    gnp::Pipeline pipeline(std::move(cfg));

    const auto report_stage = [&](const char* name, bool executed) {
        std::cout << "[" << name << "] " << (executed ? "run" : "cached") << '\n';
    };

    if (args.command == "synth") {
        pipeline.run_synth(std::cout);
    } else if (args.command == "prepare") {
        report_stage("prepare", pipeline.run_prepare());
    } else if (args.command == "train-embeddings" || args.command == "import-embeddings") {
        pipeline.require_fresh_upstream("embeddings");
        report_stage("embeddings", pipeline.run_embeddings());
    } else if (args.command == "precompute-walks") {
        pipeline.require_fresh_upstream("walks");
        report_stage("walks", pipeline.run_walks());
    } else if (args.command == "train") {
        pipeline.require_fresh_upstream("train");
        report_stage("train", pipeline.run_train());
    } else if (args.command == "eval") {
        pipeline.require_fresh_upstream("eval");
        pipeline.run_eval_stage();
        print_eval_reports(pipeline.compute_reports(), args.json_output, std::cout);
    } else if (args.command == "bench") {
        print_bench(pipeline.run_bench(), args.json_output, std::cout);
    } else if (args.command == "sweep-tau") {
        std::ostringstream tsv;
        pipeline.sweep_tau(tsv, std::cout);
        std::ofstream f(pipeline.path("sweep.tsv"), std::ios::trunc);
        f << tsv.str();
        std::cout << tsv.str();
    } else if (args.command == "full-run") {
        pipeline.full_run(std::cout);
        print_eval_reports(pipeline.compute_reports(), args.json_output, std::cout);
    } else {
        throw gnp::ConfigError("unknown command: " + args.command);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_command(parse_args(argc, argv));
    } catch (const gnp::ConfigError& e) {
        std::cerr << "error[config]: " << e.what() << '\n';
        return 2;
    } catch (const gnp::DataError& e) {
        std::cerr << "error[data]: " << e.what() << '\n';
        return 3;
    } catch (const gnp::NumericError& e) {
        std::cerr << "error[numeric]: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
}
