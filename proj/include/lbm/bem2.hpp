#pragma once

#include "lbm/data_matrix.hpp"
#include "lbm/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace lbm {

/// Fuzzy memberships and block parameters of the block mixture at fixed (K, G).
/// `theta` holds success probabilities (binary) or means (continuous);
/// `sigma2` is used only for continuous data.
struct FuzzyState {
  Eigen::MatrixXd s;  ///< n x K row memberships
  Eigen::MatrixXd t;  ///< m x G column memberships
  Eigen::VectorXd omega;
  Eigen::VectorXd rho;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd sigma2;

  int K() const { return static_cast<int>(s.cols()); }
  int G() const { return static_cast<int>(t.cols()); }
};

inline constexpr double kThetaClamp = 1e-10;
inline constexpr double kVarianceFloor = 1e-10;

/// Complete log likelihood with fuzzy weights:
/// sum s log omega + sum t log rho + sum s_ik t_jg log p(y_ij | theta_kg).
double complete_log_likelihood(const FuzzyState& st, const DataMatrix& data);

/// Fuzzy criterion: complete log likelihood plus the entropies of s and t (0 log 0 = 0).
double bem2_criterion(const FuzzyState& st, const DataMatrix& data);

/// Re-estimates omega, rho and the block parameters from s and t.
void update_parameters(FuzzyState& st, const DataMatrix& data);

/// Memberships drawn row-wise from a symmetric Dirichlet(1), parameters fitted to them.
FuzzyState random_fuzzy_state(const DataMatrix& data, int K, int G, Rng& rng);

struct Bem2Options {
  int K = 2;
  int G = 2;
  double tol = 1e-8;
  int max_iter = 5000;
  int restarts = 10;
  std::uint64_t seed = 1;
};

struct Bem2Fit {
  FuzzyState state;
  double criterion = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Criterion at the start, then after every half step (rows, columns, rows, ...).
  std::vector<double> history;
  std::vector<int> row_assign;  ///< argmax memberships, 0-based, lowest index on ties
  std::vector<int> col_assign;
  double hard_log_likelihood = 0.0;  ///< maximised at the hard assignments
  long parameter_count = 0;
  double aic3 = 0.0;
  int restart = 0;  ///< which restart produced this fit
};

/// Alternates the row step (s, omega, theta with t, rho fixed) and the column
/// step until the criterion changes by less than tol over a full iteration.
/// Throws NumericalDegeneracy if the criterion becomes non-finite.
Bem2Fit bem2_iterate(const DataMatrix& data, FuzzyState init, double tol, int max_iter);

/// Best of `restarts` random starts by final criterion.
Bem2Fit bem2_fit(const DataMatrix& data, const Bem2Options& opts);

/// n(K-1) + m(G-1) + dKG + (K-1) + (G-1).
long aic3_parameter_count(long n, long m, long K, long G, long d);

/// Log likelihood of hard partitions with every parameter at its maximum
/// likelihood value (weights = cluster proportions, block MLEs).
double hard_log_likelihood(const DataMatrix& data, const std::vector<int>& z, int K,
                           const std::vector<int>& w, int G);

}  // namespace lbm
