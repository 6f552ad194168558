#include "lbm/relabel.hpp"

#include "lbm/assignment.hpp"
#include "lbm/posterior.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lbm {

std::vector<std::size_t> processing_order(std::span<const LabelVector> samples) {
  std::vector<int> used(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) used[t] = count_nonempty(samples[t]);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return used[a] < used[b]; });
  return order;
}

std::vector<LabelVector> sort_for_processing(std::span<const LabelVector> samples) {
  std::vector<LabelVector> out;
  out.reserve(samples.size());
  for (std::size_t t : processing_order(samples)) out.push_back(samples[t]);
  return out;
}

Relabeler::Relabeler(int items) : items_(items) {
  if (items < 1) throw std::invalid_argument("relabeler needs at least one item");
}

Eigen::MatrixXd Relabeler::cost_matrix(std::span<const int> z) const {
  if (static_cast<int>(z.size()) != items_)
    throw std::invalid_argument("label vector length does not match the relabeler");
  if (processed_ < 1) throw std::logic_error("cost matrix needs at least one processed vector");
  const int top = *std::max_element(z.begin(), z.end()) + 1;
  const int dim = std::max(static_cast<int>(counts_.rows()), top);
  Eigen::MatrixXd cost =
      Eigen::MatrixXd::Constant(dim, dim, static_cast<double>(items_) * processed_);
  for (int i = 0; i < items_; ++i)
    for (int k = 0; k < counts_.rows(); ++k) cost(k, z[i]) -= counts_(k, i);
  return cost;
}

LabelVector Relabeler::relabel(std::span<const int> z) {
  if (static_cast<int>(z.size()) != items_)
    throw std::invalid_argument("label vector length does not match the relabeler");
  if (std::any_of(z.begin(), z.end(), [](int l) { return l < 0; }))
    throw std::invalid_argument("labels must be non-negative");

  LabelVector out(z.begin(), z.end());
  if (processed_ > 0) {
    const Assignment sigma = solve_assignment(cost_matrix(z));
    // Reference label k is matched with incoming label sigma(k).
    std::vector<int> inverse(sigma.of_row.size());
    for (std::size_t k = 0; k < sigma.of_row.size(); ++k) inverse[sigma.of_row[k]] = static_cast<int>(k);
    for (int& l : out) l = inverse[l];
  }
  accumulate(out);
  return out;
}

void Relabeler::accumulate(std::span<const int> z) {
  const int top = *std::max_element(z.begin(), z.end()) + 1;
  if (top > counts_.rows()) {
    const auto old = counts_.rows();
    counts_.conservativeResize(top, items_);
    counts_.bottomRows(top - old).setZero();
  }
  for (int i = 0; i < items_; ++i) ++counts_(z[i], i);
  ++processed_;
}

}  // namespace lbm
