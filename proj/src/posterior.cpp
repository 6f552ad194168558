#include "lbm/posterior.hpp"

#include "lbm/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lbm {

void Hyperparams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("Dirichlet concentrations must be positive");
  if (!(bernoulli.gamma > 0.0) || !(bernoulli.delta > 0.0))
    throw std::invalid_argument("Beta prior shapes must be positive");
  if (!(gaussian.tau2 > 0.0) || !(gaussian.delta > 0.0) || !(gaussian.gamma > 0.0))
    throw std::invalid_argument("Normal-Inverse-Gamma prior parameters must be positive");
  if (!std::isfinite(gaussian.xi)) throw std::invalid_argument("prior mean must be finite");
  if (k_max < 0 || g_max < 0) throw std::invalid_argument("cluster bounds must be positive");
}

Hyperparams Hyperparams::resolved(int n, int m) const {
  Hyperparams out = *this;
  if (out.k_max == 0) out.k_max = std::min(50, n);
  if (out.g_max == 0) out.g_max = std::min(50, m);
  out.validate();
  return out;
}

void Allocation::validate(int n, int m) const {
  if (K < 1 || G < 1) throw std::invalid_argument("allocation needs K >= 1 and G >= 1");
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != m)
    throw std::invalid_argument("allocation label vectors do not match the data dimensions");
  for (int k : z)
    if (k < 0 || k >= K) throw std::invalid_argument("row label out of range");
  for (int g : w)
    if (g < 0 || g >= G) throw std::invalid_argument("column label out of range");
}

int count_nonempty(std::span<const int> labels) {
  std::vector<int> seen(labels.begin(), labels.end());
  std::sort(seen.begin(), seen.end());
  return static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

double log_count_prior(int clusters, int bound) {
  if (clusters < 1 || clusters > bound)
    throw std::domain_error("cluster count " + std::to_string(clusters) +
                            " outside prior support 1.." + std::to_string(bound));
  return -std::lgamma(clusters + 1.0);
}

double log_dirichlet_term(double concentration, std::span<const int> sizes) {
  const auto K = static_cast<double>(sizes.size());
  double total = 0.0;
  double out = std::lgamma(concentration * K) - K * std::lgamma(concentration);
  for (int s : sizes) {
    out += std::lgamma(s + concentration);
    total += s;
  }
  return out - std::lgamma(total + concentration * K);
}

double log_posterior(const Allocation& alloc, const DataMatrix& data, const Hyperparams& hp) {
  const int n = data.rows();
  const int m = data.cols();
  alloc.validate(n, m);
  const Hyperparams h = hp.resolved(n, m);

  std::vector<int> row_sizes(alloc.K, 0), col_sizes(alloc.G, 0);
  for (int k : alloc.z) ++row_sizes[k];
  for (int g : alloc.w) ++col_sizes[g];

  std::vector<BlockStats> blocks(static_cast<std::size_t>(alloc.K) * alloc.G);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      auto& b = blocks[static_cast<std::size_t>(alloc.z[i]) * alloc.G + alloc.w[j]];
      const double y = data(i, j);
      b.count += 1.0;
      b.sum += y;
      b.sumsq += y * y;
    }
  }

  double lp = log_count_prior(alloc.K, h.k_max) + log_count_prior(alloc.G, h.g_max) +
              log_dirichlet_term(h.alpha, row_sizes) + log_dirichlet_term(h.beta, col_sizes);
  for (const auto& b : blocks) {
    if (data.variant() == Variant::Binary)
      lp += log_marginal_bernoulli(b, h.bernoulli.gamma, h.bernoulli.delta);
    else
      lp += log_marginal_gaussian(b, h.gaussian.xi, h.gaussian.tau2, h.gaussian.delta,
                                  h.gaussian.gamma);
  }
  return lp;
}

}  // namespace lbm
