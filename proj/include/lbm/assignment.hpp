#pragma once

#include <Eigen/Dense>

#include <vector>

namespace lbm {

/// Optimal square assignment: row r is matched with column of_row[r].
struct Assignment {
  std::vector<int> of_row;
  double cost = 0.0;
};

/// Minimises sum_r cost(r, of_row[r]) over all permutations.
///
/// Shortest-augmenting-path Hungarian method, O(K^3). Among optimal
/// permutations the lexicographically smallest one is returned: every optimal
/// assignment is a perfect matching on the zero-reduced-cost edges of the
/// final dual solution, and rows are pinned in order to their lowest column
/// that still admits such a matching.
///
/// Throws std::invalid_argument for non-square, negative or non-finite costs.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace lbm
