#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace lbm {

using LabelVector = std::vector<int>;

/// Indices of `samples` in processing order: stable sort by increasing
/// number of non-empty components, ties kept in chain order.
std::vector<std::size_t> processing_order(std::span<const LabelVector> samples);

/// The samples themselves, reordered by processing_order.
std::vector<LabelVector> sort_for_processing(std::span<const LabelVector> samples);

/// Online label-switching correction for a stream of label vectors over the
/// same items (rows or columns).
///
/// Keeps S(k, i) = number of processed vectors giving item i label k. The
/// incoming vector z is relabelled by the permutation minimising
///   C(k1, k2) = n T - sum_i S(k1, i) [z_i = k2],
/// i.e. the total disagreement with everything processed so far. The first
/// vector is the reference and passes through unchanged.
class Relabeler {
 public:
  explicit Relabeler(int items);

  int items() const { return items_; }
  long processed() const { return processed_; }
  const Eigen::MatrixXi& counts() const { return counts_; }

  /// Cost matrix for z; dimension max(labels seen, max label of z + 1). Rows
  /// with no history cost n T everywhere. Requires processed() >= 1.
  Eigen::MatrixXd cost_matrix(std::span<const int> z) const;

  /// Relabels z, folds it into S and returns it.
  LabelVector relabel(std::span<const int> z);

 private:
  void accumulate(std::span<const int> z);

  int items_;
  long processed_ = 0;
  Eigen::MatrixXi counts_;
};

}  // namespace lbm
