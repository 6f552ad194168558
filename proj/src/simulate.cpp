#include "lbm/simulate.hpp"

#include "lbm/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lbm {

void SimSpec::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("simulated matrix needs n, m >= 1");
  if (K < 1 || G < 1 || K > n || G > m)
    throw std::invalid_argument("simulated cluster counts need 1 <= K <= n and 1 <= G <= m");
  if (!(a >= 0.0 && a <= b && b <= 1.0))
    throw std::invalid_argument("theta interval needs 0 <= a <= b <= 1");
  if (theta_source) {
    if (theta_source->rows() != K || theta_source->cols() != G)
      throw std::invalid_argument("theta source must be K x G");
    if (theta_source->minCoeff() < 0.0 || theta_source->maxCoeff() > 1.0)
      throw std::invalid_argument("theta source values must lie in [0, 1]");
  }
}

double transform_theta(double theta, double a, double b) { return a + theta * (b - a); }

std::vector<int> banded_labels(int items, int clusters) {
  std::vector<int> out;
  out.reserve(items);
  for (int c = 0; c < clusters; ++c) {
    const int size = items / clusters + (c < items % clusters ? 1 : 0);
    out.insert(out.end(), size, c);
  }
  return out;
}

SimResult generate(const SimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  Eigen::MatrixXd theta(spec.K, spec.G);
  for (int k = 0; k < spec.K; ++k)
    for (int g = 0; g < spec.G; ++g) {
      const double raw = spec.theta_source ? (*spec.theta_source)(k, g) : uniform01(rng);
      theta(k, g) = transform_theta(raw, spec.a, spec.b);
    }

  std::vector<int> z = banded_labels(spec.n, spec.K);
  std::vector<int> w = banded_labels(spec.m, spec.G);
  RowMatrix y(spec.n, spec.m);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.m; ++j) y(i, j) = uniform01(rng) < theta(z[i], w[j]) ? 1.0 : 0.0;

  if (spec.scramble) {
    std::vector<int> rp(spec.n), cp(spec.m);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    RowMatrix shuffled(spec.n, spec.m);
    std::vector<int> z2(spec.n), w2(spec.m);
    for (int i = 0; i < spec.n; ++i) {
      z2[i] = z[rp[i]];
      for (int j = 0; j < spec.m; ++j) shuffled(i, j) = y(rp[i], cp[j]);
    }
    for (int j = 0; j < spec.m; ++j) w2[j] = w[cp[j]];
    y = std::move(shuffled);
    z = std::move(z2);
    w = std::move(w2);
  }
  return {DataMatrix(std::move(y), Variant::Binary), std::move(z), std::move(w), std::move(theta)};
}

}  // namespace lbm
