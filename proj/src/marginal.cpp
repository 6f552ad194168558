#include "lbm/marginal.hpp"

#include "lbm/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lbm {

double log_marginal_bernoulli(const BlockStats& stats, double gamma, double delta) {
  if (!(gamma > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("Beta prior shapes must be positive");
  const double c = stats.count;
  const double s = stats.sum;
  if (c < 0.0 || c != std::floor(c))
    throw InvariantViolation("binary block count must be a non-negative integer");
  if (s < 0.0 || s > c || s != std::floor(s))
    throw InvariantViolation("binary block sum must be an integer in [0, count]");
  if (c == 0.0) return 0.0;
  return std::lgamma(gamma + delta) - std::lgamma(gamma) - std::lgamma(delta) +
         std::lgamma(s + gamma) + std::lgamma(c - s + delta) - std::lgamma(c + gamma + delta);
}

double log_marginal_gaussian(const BlockStats& stats, double xi, double tau2, double delta,
                             double gamma) {
  if (!(tau2 > 0.0) || !(delta > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("Normal-Inverse-Gamma prior parameters must be positive");
  const double c = stats.count;
  if (c < 0.0) throw InvariantViolation("block count must be non-negative");
  if (c == 0.0) return 0.0;
  const double shifted = stats.sum + xi / tau2;
  const double residual =
      stats.sumsq - tau2 * shifted * shifted / (c * tau2 + 1.0) + xi * xi / tau2 + gamma;
  if (!(residual > 0.0) || !std::isfinite(residual)) {
    std::ostringstream msg;
    msg << "Gaussian block residual term is not positive (" << residual << ")";
    throw NumericalDegeneracy(msg.str());
  }
  const double half_shape = 0.5 * (c + delta);
  return 0.5 * delta * std::log(gamma) + std::lgamma(half_shape) -
         0.5 * c * std::log(std::numbers::pi) - std::lgamma(0.5 * delta) -
         0.5 * std::log(c * tau2 + 1.0) - half_shape * std::log(residual);
}

BernoulliModel::BernoulliModel(BernoulliPrior prior, long max_cells) : prior_(prior) {
  if (!(prior.gamma > 0.0) || !(prior.delta > 0.0))
    throw std::invalid_argument("Beta prior shapes must be positive");
  constant_ = std::lgamma(prior.gamma + prior.delta) - std::lgamma(prior.gamma) -
              std::lgamma(prior.delta);
  const auto size = static_cast<std::size_t>(max_cells) + 1;
  lg_success_.resize(size);
  lg_failure_.resize(size);
  lg_total_.resize(size);
  for (std::size_t x = 0; x < size; ++x) {
    const auto v = static_cast<double>(x);
    lg_success_[x] = std::lgamma(v + prior.gamma);
    lg_failure_[x] = std::lgamma(v + prior.delta);
    lg_total_[x] = std::lgamma(v + prior.gamma + prior.delta);
  }
}

GaussianModel::GaussianModel(GaussianPrior prior, long max_cells) : prior_(prior) {
  if (!(prior.tau2 > 0.0) || !(prior.delta > 0.0) || !(prior.gamma > 0.0))
    throw std::invalid_argument("Normal-Inverse-Gamma prior parameters must be positive");
  xi_over_tau2_ = prior.xi / prior.tau2;
  offset_ = prior.xi * prior.xi / prior.tau2 + prior.gamma;
  const double constant = 0.5 * prior.delta * std::log(prior.gamma) - std::lgamma(0.5 * prior.delta);
  const auto size = static_cast<std::size_t>(max_cells) + 1;
  head_.resize(size);
  shrink_.resize(size);
  exponent_.resize(size);
  for (std::size_t x = 0; x < size; ++x) {
    const auto c = static_cast<double>(x);
    exponent_[x] = 0.5 * (c + prior.delta);
    shrink_[x] = prior.tau2 / (c * prior.tau2 + 1.0);
    head_[x] = constant + std::lgamma(exponent_[x]) - 0.5 * c * std::log(std::numbers::pi) -
               0.5 * std::log(c * prior.tau2 + 1.0);
  }
}

void GaussianModel::throw_degenerate(double residual) {
  std::ostringstream msg;
  msg << "Gaussian block residual term is not positive (" << residual << ")";
  throw NumericalDegeneracy(msg.str());
}

}  // namespace lbm
