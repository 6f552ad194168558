#pragma once

#include "lbm/hyperparams.hpp"

#include <cmath>
#include <vector>

namespace lbm {

/// Sufficient statistics of one (row cluster, column cluster) block.
struct BlockStats {
  double count = 0.0;  ///< n_k * m_g cells
  double sum = 0.0;
  double sumsq = 0.0;  ///< only meaningful for continuous data
};

/// Log of the Beta-Bernoulli block marginal likelihood. Empty blocks give 0.
/// Throws InvariantViolation for a non-integer or out-of-range sum.
double log_marginal_bernoulli(const BlockStats& stats, double gamma, double delta);

/// Log of the Normal-Inverse-Gamma block marginal likelihood
/// (mu ~ N(xi, tau2 sigma2), sigma2 ~ IG(delta/2, gamma/2)). Empty blocks give 0.
/// Throws NumericalDegeneracy when the residual term is not strictly positive.
double log_marginal_gaussian(const BlockStats& stats, double xi, double tau2, double delta,
                             double gamma);

/// Beta-Bernoulli block model with log-gamma tables indexed by integer counts.
///
/// Tables cover counts up to max_cells, so the hot path is three lookups.
class BernoulliModel {
 public:
  static constexpr bool kUsesSquares = false;
  static constexpr int kParamDim = 1;

  BernoulliModel(BernoulliPrior prior, long max_cells);

  double log_marginal(double count, double sum, double /*sumsq*/) const {
    if (count <= 0.0) return 0.0;
    const auto c = static_cast<long>(count);
    const auto s = static_cast<long>(sum);
    return constant_ + lg_success_[s] + lg_failure_[c - s] - lg_total_[c];
  }

  const BernoulliPrior& prior() const { return prior_; }

 private:
  BernoulliPrior prior_;
  double constant_;
  std::vector<double> lg_success_;  // lgamma(x + gamma)
  std::vector<double> lg_failure_;  // lgamma(x + delta)
  std::vector<double> lg_total_;    // lgamma(x + gamma + delta)
};

/// Normal-Inverse-Gamma block model with per-count tables.
class GaussianModel {
 public:
  static constexpr bool kUsesSquares = true;
  static constexpr int kParamDim = 2;

  GaussianModel(GaussianPrior prior, long max_cells);

  double log_marginal(double count, double sum, double sumsq) const {
    if (count <= 0.0) return 0.0;
    const auto c = static_cast<long>(count);
    const double shifted = sum + xi_over_tau2_;
    const double residual = sumsq - shrink_[c] * shifted * shifted + offset_;
    if (!(residual > 0.0)) throw_degenerate(residual);
    return head_[c] - exponent_[c] * std::log(residual);
  }

  const GaussianPrior& prior() const { return prior_; }

 private:
  [[noreturn]] static void throw_degenerate(double residual);

  GaussianPrior prior_;
  double xi_over_tau2_;
  double offset_;                 // xi^2 / tau2 + gamma
  std::vector<double> head_;      // everything except the residual power
  std::vector<double> shrink_;    // tau2 / (c tau2 + 1)
  std::vector<double> exponent_;  // (c + delta) / 2
};

}  // namespace lbm
