#pragma once

#include "lbm/chain.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace lbm {

struct PmpEntry {
  int K = 0;
  int G = 0;
  long visits = 0;
  double probability = 0.0;
};

/// Visit frequencies of (K, G) models, most visited first (ties by K then G).
struct PmpTable {
  std::vector<PmpEntry> entries;
  long total = 0;

  double probability(int K, int G) const;
  const PmpEntry& modal() const { return entries.front(); }
};

/// Posterior model probabilities over sampled (K, G). With count_nonempty set,
/// models are keyed by the number of non-empty clusters instead.
/// Throws std::invalid_argument for an empty trace.
PmpTable pmp_table(std::span<const Sample> samples, bool count_nonempty = false);

struct IatEstimate {
  double tau = 1.0;
  bool degenerate = false;  ///< constant series: autocorrelation undefined, tau set to 1
  int window = 0;           ///< number of lags summed
  long length = 0;
};

/// tau = 1 + 2 sum_{t>=1} rho(t), summing lags until the first with
/// rho(t) < 0.05 or t > length / 50, whichever comes first.
/// Requires at least 100 values.
IatEstimate integrated_autocorrelation_time(std::span<const double> series);

/// IAT of the model-index series R = (K - 1) g_max + G.
IatEstimate model_iat(std::span<const Sample> samples, int g_max);

/// Posterior membership probabilities within the modal (K, G) model.
struct MembershipSummary {
  int K = 0;
  int G = 0;
  long draws = 0;
  Eigen::MatrixXd row_probs;  ///< n x K
  Eigen::MatrixXd col_probs;  ///< m x G
  std::vector<int> row_assign;  ///< argmax of each row of row_probs (0-based)
  std::vector<int> col_assign;
};

/// Takes the samples of the most visited (K, G), undoes label switching on
/// rows and columns separately, and tabulates label frequencies.
MembershipSummary modal_summary(std::span<const Sample> samples);

/// Same, for an explicitly chosen model (K, G); throws if it was never visited.
MembershipSummary model_summary(std::span<const Sample> samples, int K, int G);

/// Argmax per row, lowest index on ties.
std::vector<int> hard_assign(const Eigen::MatrixXd& probs);

/// Sample with the highest stored log posterior; earliest on ties.
const Sample& map_estimate(std::span<const Sample> samples);

/// Hubert-Arabie adjusted Rand index of two partitions of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Counts of annotation categories within each cluster.
struct Crosstab {
  std::vector<std::string> categories;  ///< in order of first appearance
  Eigen::MatrixXi counts;               ///< clusters x categories
};

Crosstab crosstab(std::span<const int> assign, int clusters,
                  std::span<const std::string> annotations);

}  // namespace lbm
