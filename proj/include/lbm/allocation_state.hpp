#pragma once

#include "lbm/marginal.hpp"
#include "lbm/posterior.hpp"

#include <Eigen/Dense>

#include <array>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lbm {

/// Cluster labels plus every cache the sampler needs to price a move.
///
/// Caches kept in step with the labels:
///  - cluster sizes on both axes,
///  - per-block sums (and sums of squares for continuous data) and their
///    log marginal likelihoods, stored K_max x G_max in row-cluster-major order,
///  - aggregates: agg(Rows)(i, g) = sum_{j: w_j = g} y_ij and
///    agg(Cols)(j, k) = sum_{i: z_i = k} y_ij.
///
/// Moving row i costs O(G) marginal evaluations (its block contributions are
/// read off agg(Rows)) plus an O(m) refresh of agg(Cols). Columns are symmetric.
///
/// Everything is expressed in terms of an Axis so that each move is written
/// once: "own" clusters are those of the axis being moved and "other"
/// clusters those of the opposite axis.
template <class Model>
class AllocationState {
 public:
  AllocationState(const DataMatrix& data, const Hyperparams& hp, Model model, Allocation alloc)
      : data_(&data), hp_(hp.resolved(data.rows(), data.cols())), model_(std::move(model)) {
    alloc.validate(data.rows(), data.cols());
    if (alloc.K > hp_.k_max || alloc.G > hp_.g_max)
      throw std::domain_error("initial cluster count exceeds its bound");
    count_ = {alloc.K, alloc.G};
    labels_ = {std::move(alloc.z), std::move(alloc.w)};
    items_ = {data.rows(), data.cols()};
    capacity_ = {hp_.k_max, hp_.g_max};
    concentration_ = {hp_.alpha, hp_.beta};
    recompute();
  }

  const DataMatrix& data() const { return *data_; }
  const Hyperparams& hyperparams() const { return hp_; }
  const Model& model() const { return model_; }

  int clusters(Axis a) const { return count_[index(a)]; }
  int capacity(Axis a) const { return capacity_[index(a)]; }
  int items(Axis a) const { return items_[index(a)]; }
  double concentration(Axis a) const { return concentration_[index(a)]; }
  const std::vector<int>& labels(Axis a) const { return labels_[index(a)]; }
  int label(Axis a, int item) const { return labels_[index(a)][item]; }
  int size(Axis a, int c) const { return sizes_[index(a)][c]; }
  std::vector<int> sizes(Axis a) const {
    const auto& s = sizes_[index(a)];
    return {s.begin(), s.begin() + clusters(a)};
  }

  int nonempty(Axis a) const {
    int out = 0;
    for (int c = 0; c < clusters(a); ++c) out += size(a, c) > 0;
    return out;
  }

  Allocation allocation() const { return {count_[0], count_[1], labels_[0], labels_[1]}; }

  /// Statistics of block (row cluster k, column cluster g).
  BlockStats block(int k, int g) const {
    return {static_cast<double>(sizes_[0][k]) * sizes_[1][g], sum_(k, g),
            Model::kUsesSquares ? sumsq_(k, g) : sum_(k, g)};
  }
  double block_log_marginal(int k, int g) const { return logm_(k, g); }

  /// Block statistics addressed from one axis: own cluster c, other cluster h.
  BlockStats oriented_block(Axis a, int c, int h) const {
    return a == Axis::Rows ? block(c, h) : block(h, c);
  }
  double oriented_log_marginal(Axis a, int c, int h) const {
    return a == Axis::Rows ? logm_(c, h) : logm_(h, c);
  }

  /// Sum (and sum of squares) of item i's cells lying in other-axis cluster h.
  double aggregate(Axis a, int item, int h) const { return agg_[index(a)](item, h); }
  double aggregate_sq(Axis a, int item, int h) const {
    return Model::kUsesSquares ? aggsq_[index(a)](item, h) : agg_[index(a)](item, h);
  }

  /// Log marginal of own-cluster c's block against other cluster h after
  /// adding (sign = +1) or removing (sign = -1) item i.
  double log_marginal_with(Axis a, int c, int h, int item, int sign) const {
    const BlockStats b = oriented_block(a, c, h);
    const double other = size(opposite(a), h);
    return model_.log_marginal(b.count + sign * other, b.sum + sign * aggregate(a, item, h),
                               b.sumsq + sign * aggregate_sq(a, item, h));
  }

  /// Terms of the log posterior that depend on own-cluster c alone:
  /// log Gamma(size + concentration) + sum_h log M.
  double cluster_log_term(Axis a, int c) const {
    double out = std::lgamma(size(a, c) + concentration(a));
    for (int h = 0; h < clusters(opposite(a)); ++h) out += oriented_log_marginal(a, c, h);
    return out;
  }

  /// Collapsed log posterior assembled from the caches.
  double log_posterior() const {
    const auto rs = sizes(Axis::Rows);
    const auto cs = sizes(Axis::Cols);
    double lp = log_count_prior(count_[0], capacity_[0]) + log_count_prior(count_[1], capacity_[1]) +
                log_dirichlet_term(hp_.alpha, rs) + log_dirichlet_term(hp_.beta, cs);
    for (int k = 0; k < count_[0]; ++k)
      for (int g = 0; g < count_[1]; ++g) lp += logm_(k, g);
    return lp;
  }

  /// Moves item i to own-cluster `to`; returns the exact change in log posterior.
  double move(Axis a, int item, int to) {
    assert(to >= 0 && to < clusters(a));
    const int from = label(a, item);
    if (from == to) return 0.0;
    const double before = cluster_log_term(a, from) + cluster_log_term(a, to);
    detach(a, item);
    attach(a, item, to);
    return cluster_log_term(a, from) + cluster_log_term(a, to) - before;
  }

  /// Appends an empty cluster with label clusters(a).
  void add_cluster(Axis a) {
    const int c = clusters(a);
    if (c >= capacity(a)) throw std::logic_error("cluster capacity exhausted");
    sizes_[index(a)][c] = 0;
    agg_[index(opposite(a))].col(c).setZero();
    if constexpr (Model::kUsesSquares) aggsq_[index(opposite(a))].col(c).setZero();
    for (int h = 0; h < clusters(opposite(a)); ++h) set_block(a, c, h, 0.0, 0.0);
    ++count_[index(a)];
  }

  /// Deletes empty cluster c; labels above c shift down by one.
  void remove_cluster(Axis a, int c) {
    if (size(a, c) != 0) throw std::logic_error("only empty clusters can be removed");
    for (int d = c; d + 1 < clusters(a); ++d) swap_labels(a, d, d + 1);
    --count_[index(a)];
  }

  /// Exchanges the names of own-clusters c1 and c2.
  void swap_labels(Axis a, int c1, int c2) {
    if (c1 == c2) return;
    for (int& l : labels_[index(a)]) {
      if (l == c1)
        l = c2;
      else if (l == c2)
        l = c1;
    }
    std::swap(sizes_[index(a)][c1], sizes_[index(a)][c2]);
    agg_[index(opposite(a))].col(c1).swap(agg_[index(opposite(a))].col(c2));
    if constexpr (Model::kUsesSquares)
      aggsq_[index(opposite(a))].col(c1).swap(aggsq_[index(opposite(a))].col(c2));
    if (a == Axis::Rows) {
      sum_.row(c1).swap(sum_.row(c2));
      logm_.row(c1).swap(logm_.row(c2));
      if constexpr (Model::kUsesSquares) sumsq_.row(c1).swap(sumsq_.row(c2));
    } else {
      sum_.col(c1).swap(sum_.col(c2));
      logm_.col(c1).swap(logm_.col(c2));
      if constexpr (Model::kUsesSquares) sumsq_.col(c1).swap(sumsq_.col(c2));
    }
  }

  /// Rebuilds every cache from the data and current labels.
  void recompute() {
    const int n = items_[0];
    const int m = items_[1];
    for (int a = 0; a < 2; ++a) sizes_[a].assign(capacity_[a], 0);
    for (int k : labels_[0]) ++sizes_[0][k];
    for (int g : labels_[1]) ++sizes_[1][g];

    agg_[0].setZero(n, capacity_[1]);
    agg_[1].setZero(m, capacity_[0]);
    if constexpr (Model::kUsesSquares) {
      aggsq_[0].setZero(n, capacity_[1]);
      aggsq_[1].setZero(m, capacity_[0]);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double y = (*data_)(i, j);
        agg_[0](i, labels_[1][j]) += y;
        agg_[1](j, labels_[0][i]) += y;
        if constexpr (Model::kUsesSquares) {
          aggsq_[0](i, labels_[1][j]) += y * y;
          aggsq_[1](j, labels_[0][i]) += y * y;
        }
      }
    }

    sum_.setZero(capacity_[0], capacity_[1]);
    sumsq_.setZero(Model::kUsesSquares ? capacity_[0] : 0, Model::kUsesSquares ? capacity_[1] : 0);
    logm_.setZero(capacity_[0], capacity_[1]);
    for (int i = 0; i < n; ++i) {
      const int k = labels_[0][i];
      for (int g = 0; g < count_[1]; ++g) {
        sum_(k, g) += agg_[0](i, g);
        if constexpr (Model::kUsesSquares) sumsq_(k, g) += aggsq_[0](i, g);
      }
    }
    for (int k = 0; k < count_[0]; ++k)
      for (int g = 0; g < count_[1]; ++g) refresh_block(k, g);
  }

 private:
  double y(Axis a, int item, int other) const {
    return a == Axis::Rows ? (*data_)(item, other) : (*data_)(other, item);
  }

  void refresh_block(int k, int g) {
    const BlockStats b = block(k, g);
    logm_(k, g) = model_.log_marginal(b.count, b.sum, b.sumsq);
  }

  void set_block(Axis a, int c, int h, double sum, double sumsq) {
    const int k = a == Axis::Rows ? c : h;
    const int g = a == Axis::Rows ? h : c;
    sum_(k, g) = sum;
    if constexpr (Model::kUsesSquares) sumsq_(k, g) = sumsq;
    refresh_block(k, g);
  }

  void shift_item(Axis a, int item, int c, int sign) {
    const Axis b = opposite(a);
    sizes_[index(a)][c] += sign;
    for (int h = 0; h < clusters(b); ++h) {
      const BlockStats s = oriented_block(a, c, h);
      set_block(a, c, h, s.sum + sign * aggregate(a, item, h),
                s.sumsq + sign * aggregate_sq(a, item, h));
    }
    auto& other_agg = agg_[index(b)];
    for (int j = 0; j < items(b); ++j) {
      const double v = y(a, item, j);
      other_agg(j, c) += sign * v;
      if constexpr (Model::kUsesSquares) aggsq_[index(b)](j, c) += sign * v * v;
    }
  }

  void detach(Axis a, int item) { shift_item(a, item, label(a, item), -1); }

  void attach(Axis a, int item, int c) {
    labels_[index(a)][item] = c;
    shift_item(a, item, c, +1);
  }

  const DataMatrix* data_;
  Hyperparams hp_;
  Model model_;
  std::array<int, 2> count_{};
  std::array<int, 2> items_{};
  std::array<int, 2> capacity_{};
  std::array<double, 2> concentration_{};
  std::array<std::vector<int>, 2> labels_;
  std::array<std::vector<int>, 2> sizes_;
  std::array<RowMatrix, 2> agg_;
  std::array<RowMatrix, 2> aggsq_;
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd sumsq_;
  Eigen::MatrixXd logm_;
};

/// Builds the block model matching the data variant.
inline BernoulliModel make_bernoulli_model(const DataMatrix& data, const Hyperparams& hp) {
  return {hp.bernoulli, static_cast<long>(data.rows()) * data.cols()};
}
inline GaussianModel make_gaussian_model(const DataMatrix& data, const Hyperparams& hp) {
  return {hp.gaussian, static_cast<long>(data.rows()) * data.cols()};
}

}  // namespace lbm
