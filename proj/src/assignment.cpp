#include "lbm/assignment.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lbm {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("cost matrix must be square");
  if (!cost.allFinite()) throw std::invalid_argument("cost matrix must be finite");
  if (cost.size() > 0 && cost.minCoeff() < 0.0)
    throw std::invalid_argument("cost matrix must be non-negative");

  const int n = static_cast<int>(cost.rows());
  Assignment out;
  if (n == 0) return out;

  // 1-based potentials; p[j] is the row matched to column j, p[0] the row being inserted.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_of(n), col_of(n);
  for (int j = 1; j <= n; ++j) {
    row_of[j - 1] = p[j] - 1;
    col_of[p[j] - 1] = j - 1;
  }

  const double eps = 1e-9 * std::max(1.0, cost.cwiseAbs().maxCoeff());
  auto tight = [&](int r, int c) { return std::abs(cost(r, c) - u[r + 1] - v[c + 1]) <= eps; };

  // Pin rows in order to the lowest feasible tight column.
  std::vector<char> seen(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (row_of[c] < r || !tight(r, c)) continue;
      if (col_of[r] == c) break;
      // Column c is held by a later row; re-route that row along tight edges
      // to the column r currently holds, touching only rows after r.
      const int freed = col_of[r];
      std::fill(seen.begin(), seen.end(), false);
      std::function<bool(int)> reroute = [&](int row) -> bool {
        for (int cc = 0; cc < n; ++cc) {
          if (cc == c || seen[cc] || !tight(row, cc)) continue;
          if (cc != freed && row_of[cc] <= r) continue;
          seen[cc] = true;
          if (cc == freed || reroute(row_of[cc])) {
            col_of[row] = cc;
            row_of[cc] = row;
            return true;
          }
        }
        return false;
      };
      if (reroute(row_of[c])) {
        col_of[r] = c;
        row_of[c] = r;
        break;
      }
    }
  }

  out.of_row = col_of;
  for (int r = 0; r < n; ++r) out.cost += cost(r, col_of[r]);
  return out;
}

}  // namespace lbm
