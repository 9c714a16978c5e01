#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gnp/config.hpp"
#include "gnp/eval.hpp"

namespace gnp {

// Stage chain: prepare -> embeddings -> walks -> train -> eval. Each stage is
// cached by a stamp recording its config-chain hash and output hashes; a
// stage that actually runs drops every downstream stamp.
class Pipeline {
  public:
    explicit Pipeline(RunConfig cfg);

    // Each returns true when the stage executed, false on a cache hit.
    bool run_prepare();
    bool run_embeddings();
    bool run_walks();
    bool run_train();
    bool run_eval_stage();

    // Recomputes the evaluation reports from the persisted artifacts
    // (timing fields included); requires the train stage to be fresh.
    std::vector<EvalReport> compute_reports();

    // prepare .. eval in order; per-stage run/cached lines go to `log`.
    void full_run(std::ostream& log);

    // One train+eval per tau over the shared split/embeddings/walks.
    void sweep_tau(std::ostream& tsv_out, std::ostream& log);

    BenchReport run_bench() const;

    // Writes the synthetic fixture to the [data] paths of the config.
    void run_synth(std::ostream& log) const;

    bool stage_fresh(const std::string& stage) const;
    void require_fresh_upstream(const std::string& stage) const;

    std::string path(const std::string& rel) const;
    const RunConfig& config() const { return cfg_; }

  private:
    RunConfig cfg_;

    std::uint64_t chain_hash(const std::string& stage) const;
    std::vector<std::string> stage_outputs(const std::string& stage) const;
    bool run_stage(const std::string& stage, bool (Pipeline::*impl)());
    void drop_downstream_stamps(const std::string& stage) const;
    void write_stamp(const std::string& stage) const;

    bool impl_prepare();
    bool impl_embeddings();
    bool impl_walks();
    bool impl_train();
    bool impl_eval();
};

// Split artifacts round trip (manifest + partition files under `dir`).
void write_split_files(const std::string& dir, const DatasetSplit& split, const Dataset& dataset,
                       std::uint64_t master_seed, const SplitFractions& fractions);
DatasetSplit read_split_files(const std::string& dir);

} // namespace gnp
