#pragma once

#include "lbm/data_matrix.hpp"
#include "lbm/hyperparams.hpp"
#include "lbm/posterior.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace lbm {

/// Which moves run and with what proposal probabilities.
struct MoveSchedule {
  /// Probability of proposing a split (vs. a combine) below the cluster bound.
  double split_probability = 0.5;
  /// Fraction of single-label updates done by Gibbs; the rest are Metropolis
  /// proposals of a uniformly chosen other label.
  double gibbs_fraction = 1.0;

  /// p_split at `clusters` components: 0 at the bound, split_probability otherwise.
  double p_split(int clusters, int bound) const {
    return clusters >= bound ? 0.0 : split_probability;
  }
  void validate() const;
};

enum class InitKind { SingleCluster, Random };

struct ChainConfig {
  long iterations = 110000;  ///< total sweeps, burn-in included
  long burn_in = 10000;
  long thin = 10;
  std::uint64_t seed = 1;
  InitKind init = InitKind::SingleCluster;
  int init_k = 1;  ///< used by InitKind::Random
  int init_g = 1;

  void validate() const;
};

struct Sample {
  long iteration = 0;  ///< 1-based sweep number
  Allocation alloc;
  int k_nonempty = 1;
  int g_nonempty = 1;
  double log_posterior = 0.0;
};

struct MoveCounter {
  long proposed = 0;
  long accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

/// Counters indexed by axis (0 = rows, 1 = columns).
struct AcceptanceReport {
  std::array<MoveCounter, 2> single;
  std::array<MoveCounter, 2> reallocate;
  std::array<MoveCounter, 2> split;
  std::array<MoveCounter, 2> combine;
};

struct ChainTrace {
  std::vector<Sample> samples;
  AcceptanceReport acceptance;
  std::uint64_t seed = 0;
  int k_max = 0;
  int g_max = 0;
};

/// Receives each retained sample; when given, samples are not stored in the trace.
using SampleSink = std::function<void(const Sample&)>;

/// Runs one chain: every sweep does Gibbs over all rows, Gibbs over all
/// columns, one multi-item reallocation per axis and one split/combine per
/// axis. The first burn_in sweeps are discarded and every thin-th sweep after
/// that is kept. Deterministic given cfg.seed.
ChainTrace run_chain(const DataMatrix& data, const Hyperparams& hp, const ChainConfig& cfg,
                     const MoveSchedule& sched, const SampleSink& sink = {});

/// Initial allocation described by cfg (drawn from its own seed stream).
Allocation initial_allocation(int n, int m, const Hyperparams& resolved, const ChainConfig& cfg);

}  // namespace lbm
