#pragma once

#include "lbm/chain.hpp"
#include "lbm/io.hpp"
#include "lbm/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lbm {

/// Files written so far in an output directory; flushed to manifest.txt with a
/// status line, also when a run aborts part way.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void add(const std::filesystem::path& file) { files_.push_back(file); }
  void write(const std::string& status) const;
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

/// Inputs to the summary writers besides the samples themselves.
struct SummaryContext {
  int g_max = 0;
  std::vector<std::string> column_names;
  std::vector<std::string> annotations;  ///< one per row, optional
};

/// Writes pmp.csv, pmp_nonempty.csv, iat.csv, rows_membership.csv,
/// cols_membership.csv, map.csv and (with annotations) crosstab.csv.
void write_summaries(const std::filesystem::path& dir, const std::vector<Sample>& samples,
                     const SummaryContext& ctx, Manifest& manifest);

void write_acceptance(const std::filesystem::path& file, const AcceptanceReport& acc);

struct RunResult {
  Hyperparams resolved;
  std::vector<ChainTrace> chains;
  std::vector<std::filesystem::path> chain_dirs;
};

/// Runs cfg.chains chains (concurrently when more than one) and writes every
/// artifact under cfg.output_dir. A single chain writes directly into the
/// output directory; several chains write to chain_1, chain_2, ... and the
/// top level receives summaries of the pooled samples.
RunResult run_experiment(const RunConfig& cfg, std::ostream* log = nullptr);

/// Re-reads config.json and the trace(s) in dir and rewrites the summaries.
/// The stored log posterior of `verify` evenly spaced samples per chain is
/// recomputed from the data; returns the largest absolute discrepancy.
double summarize_run(const std::filesystem::path& dir, int verify, std::ostream* log = nullptr);

/// Writes data.csv, truth.csv, theta.csv and sim.json.
void write_simulation(const std::filesystem::path& dir, const SimSpec& spec, const SimResult& sim);

struct Evaluation {
  double ari_rows = 0.0;
  double ari_cols = 0.0;
  double map_ari_rows = 0.0;
  double map_ari_cols = 0.0;
};

/// Adjusted Rand indices of a run's modal hard assignments and MAP clustering
/// against a simulation's truth.csv. Also writes evaluation.csv into run_dir.
Evaluation evaluate_run(const std::filesystem::path& truth_dir, const std::filesystem::path& run_dir);

}  // namespace lbm
