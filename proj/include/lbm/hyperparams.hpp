#pragma once

#include "lbm/data_matrix.hpp"

namespace lbm {

/// Beta(gamma, delta) prior on each block success probability.
struct BernoulliPrior {
  double gamma = 1.0;
  double delta = 1.0;
};

/// mu ~ N(xi, tau2 * sigma2), sigma2 ~ IG(delta / 2, gamma / 2).
struct GaussianPrior {
  double xi = 0.0;
  double tau2 = 100.0;
  double delta = 0.02;
  double gamma = 0.02;
};

/// Prior settings of the collapsed model.
///
/// The number of row (column) clusters has a Poisson(1) prior truncated to
/// 1..k_max (1..g_max). A bound of 0 means "resolve from the data":
/// min(50, n) for rows and min(50, m) for columns.
struct Hyperparams {
  double alpha = 1.0;  ///< Dirichlet concentration of row weights
  double beta = 1.0;   ///< Dirichlet concentration of column weights
  BernoulliPrior bernoulli;
  GaussianPrior gaussian;
  int k_max = 0;
  int g_max = 0;

  /// Copy with k_max / g_max filled in for an n x m matrix; validates.
  Hyperparams resolved(int n, int m) const;
  void validate() const;
};

}  // namespace lbm
