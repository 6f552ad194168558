#pragma once

#include "lbm/data_matrix.hpp"
#include "lbm/hyperparams.hpp"

#include <span>
#include <vector>

namespace lbm {

enum class Axis { Rows = 0, Cols = 1 };

constexpr Axis opposite(Axis a) { return a == Axis::Rows ? Axis::Cols : Axis::Rows; }
constexpr int index(Axis a) { return static_cast<int>(a); }

/// A block clustering: K row clusters, G column clusters and 0-based labels.
/// Clusters may be empty.
struct Allocation {
  int K = 1;
  int G = 1;
  std::vector<int> z;  ///< row labels in [0, K)
  std::vector<int> w;  ///< column labels in [0, G)

  int clusters(Axis a) const { return a == Axis::Rows ? K : G; }
  const std::vector<int>& labels(Axis a) const { return a == Axis::Rows ? z : w; }

  /// Throws std::invalid_argument unless sizes match n x m and labels are in range.
  void validate(int n, int m) const;

  bool operator==(const Allocation&) const = default;
};

/// Number of distinct labels in use.
int count_nonempty(std::span<const int> labels);

/// log of the unnormalised truncated Poisson(1) prior, -log K!.
/// Throws std::domain_error outside 1..bound.
double log_count_prior(int clusters, int bound);

/// log Gamma(a K) - K log Gamma(a) - log Gamma(N + a K) + sum_k log Gamma(N_k + a):
/// the Dirichlet-multinomial term left after integrating out mixing weights.
double log_dirichlet_term(double concentration, std::span<const int> sizes);

/// Collapsed log posterior of (K, G, z, w) up to a constant, evaluated from
/// scratch by summing block statistics straight off the data.
double log_posterior(const Allocation& alloc, const DataMatrix& data, const Hyperparams& hp);

}  // namespace lbm
