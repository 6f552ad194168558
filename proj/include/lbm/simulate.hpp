#pragma once

#include "lbm/data_matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace lbm {

/// Synthetic binary block data. Block probabilities are drawn from U[0, 1]
/// (or taken from theta_source) and mapped into [a, b].
struct SimSpec {
  int n = 200;
  int m = 200;
  int K = 4;
  int G = 4;
  double a = 0.0;
  double b = 1.0;
  std::uint64_t seed = 1;
  bool scramble = true;
  /// K x G values in [0, 1] used instead of random draws.
  std::optional<Eigen::MatrixXd> theta_source;

  void validate() const;
};

/// a + theta (b - a).
double transform_theta(double theta, double a, double b);

/// Labels 0..clusters-1 in contiguous equal bands; the first (items mod clusters)
/// bands get one extra item.
std::vector<int> banded_labels(int items, int clusters);

struct SimResult {
  DataMatrix data;
  std::vector<int> z;    ///< true row labels, 0-based
  std::vector<int> w;    ///< true column labels, 0-based
  Eigen::MatrixXd theta; ///< transformed block probabilities
};

/// Draws theta, fills each cell with a Bernoulli(theta_kg) variate, then
/// permutes rows and columns when scrambling. Deterministic given the seed.
SimResult generate(const SimSpec& spec);

}  // namespace lbm
