#pragma once

#include "lbm/allocation_state.hpp"
#include "lbm/chain.hpp"
#include "lbm/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace lbm {

/// Log probability of placing item i in own-cluster c, relative to i being
/// absent, up to a constant shared by all c:
/// log(size_c^{(-i)} + concentration) + sum_h [log M_ch^{(+i)} - log M_ch].
template <class Model>
double placement_log_weight(const AllocationState<Model>& st, Axis a, int item, int c) {
  const Axis b = opposite(a);
  const bool current = st.label(a, item) == c;
  double w = std::log(st.size(a, c) - (current ? 1 : 0) + st.concentration(a));
  for (int h = 0; h < st.clusters(b); ++h) {
    if (current)
      w += st.oriented_log_marginal(a, c, h) - st.log_marginal_with(a, c, h, item, -1);
    else
      w += st.log_marginal_with(a, c, h, item, +1) - st.oriented_log_marginal(a, c, h);
  }
  return w;
}

/// Normalised log full conditional of item i's label over all own-clusters.
template <class Model>
Eigen::VectorXd conditional_log_probs(const AllocationState<Model>& st, Axis a, int item) {
  Eigen::VectorXd w(st.clusters(a));
  for (int c = 0; c < st.clusters(a); ++c) w(c) = placement_log_weight(st, a, item, c);
  return w.array() - log_sum_exp(w);
}

/// Samples item i's label from its full conditional. Returns the change in log posterior.
template <class Model>
double gibbs_update(AllocationState<Model>& st, Axis a, int item, Rng& rng) {
  if (st.clusters(a) == 1) return 0.0;
  const Eigen::VectorXd logp = conditional_log_probs(st, a, item);
  double u = uniform01(rng);
  int pick = st.clusters(a) - 1;
  for (int c = 0; c < st.clusters(a); ++c) {
    u -= std::exp(logp(c));
    if (u < 0.0) {
      pick = c;
      break;
    }
  }
  return st.move(a, item, pick);
}

/// Metropolis single-label move: proposes a uniformly chosen other label.
template <class Model>
bool metropolis_update(AllocationState<Model>& st, Axis a, int item, Rng& rng) {
  const int K = st.clusters(a);
  if (K == 1) return false;
  const int cur = st.label(a, item);
  int to = uniform_int(rng, K - 1);
  if (to >= cur) ++to;
  const double log_accept =
      placement_log_weight(st, a, item, to) - placement_log_weight(st, a, item, cur);
  if (std::log(uniform01(rng)) < log_accept) {
    st.move(a, item, to);
    return true;
  }
  return false;
}

/// Result of sequentially allocating a set of items between two initially
/// empty own-clusters (side 0 and side 1).
struct SequentialAllocation {
  std::vector<int> side;    ///< side of each item, in processing order
  double log_prob = 0.0;    ///< log of the product of the chosen sides' probabilities
  std::array<int, 2> size{0, 0};
  std::array<double, 2> cluster_term{0.0, 0.0};  ///< log Gamma(size + conc) + sum_h log M
};

/// Allocates `order` one item at a time, each to side s with probability
/// proportional to the chance that side s generated it given the items
/// already placed:
///   p1 / p0 = (size1 + conc) / (size0 + conc) * prod_h M1h^{(+i)} M0h / (M1h M0h^{(+i)}).
/// With `forced` non-empty the sides are taken from it (probabilities are still
/// accumulated); otherwise they are drawn from rng.
template <class Model>
SequentialAllocation allocate_sequentially(const AllocationState<Model>& st, Axis a,
                                           std::span<const int> order,
                                           std::span<const int> forced, Rng* rng) {
  const Axis b = opposite(a);
  const int H = st.clusters(b);
  const double conc = st.concentration(a);
  const auto& model = st.model();

  Eigen::Array2Xd sum = Eigen::Array2Xd::Zero(2, H);
  Eigen::Array2Xd sumsq = Eigen::Array2Xd::Zero(2, H);
  Eigen::Array2Xd logm = Eigen::Array2Xd::Zero(2, H);
  Eigen::Array2Xd next(2, H);

  SequentialAllocation out;
  out.side.reserve(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) {
    const int item = order[t];
    double gain[2];
    for (int s = 0; s < 2; ++s) {
      gain[s] = std::log(out.size[s] + conc);
      for (int h = 0; h < H; ++h) {
        const double other = st.size(b, h);
        next(s, h) = model.log_marginal((out.size[s] + 1.0) * other,
                                        sum(s, h) + st.aggregate(a, item, h),
                                        sumsq(s, h) + st.aggregate_sq(a, item, h));
        gain[s] += next(s, h) - logm(s, h);
      }
    }
    // log p1 = gain1 - logsumexp(gain0, gain1), computed stably.
    const double mx = std::max(gain[0], gain[1]);
    const double lse = mx + std::log(std::exp(gain[0] - mx) + std::exp(gain[1] - mx));
    const double log_p1 = gain[1] - lse;
    const double log_p0 = gain[0] - lse;

    int side;
    if (!forced.empty())
      side = forced[t];
    else
      side = std::log(uniform01(*rng)) < log_p1 ? 1 : 0;

    out.log_prob += side ? log_p1 : log_p0;
    out.side.push_back(side);
    ++out.size[side];
    for (int h = 0; h < H; ++h) {
      sum(side, h) += st.aggregate(a, item, h);
      sumsq(side, h) += st.aggregate_sq(a, item, h);
      logm(side, h) = next(side, h);
    }
  }
  for (int s = 0; s < 2; ++s)
    out.cluster_term[s] = std::lgamma(out.size[s] + conc) + logm.row(s).sum();
  return out;
}

struct MoveOutcome {
  bool accepted = false;
  double log_accept = 0.0;  ///< log of the acceptance ratio (before min with 1)
  double delta = 0.0;       ///< change in log posterior when accepted
};

/// Items of own-clusters c1 and (optionally) c2, in index order.
template <class Model>
std::vector<int> members(const AllocationState<Model>& st, Axis a, int c1, int c2 = -1) {
  std::vector<int> out;
  const auto& labels = st.labels(a);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] == c1 || labels[i] == c2) out.push_back(i);
  return out;
}

/// Reallocation of all items of two clusters (k, k'): the items are shuffled,
/// both clusters emptied, and the items reassigned one by one by
/// allocate_sequentially. The reverse proposal probability is the same
/// sequential scheme replayed with the current labels forced.
template <class Model>
MoveOutcome reallocate(AllocationState<Model>& st, Axis a, Rng& rng) {
  MoveOutcome out;
  const int K = st.clusters(a);
  if (K < 2) return out;
  const int k = uniform_int(rng, K);
  int k2 = uniform_int(rng, K - 1);
  if (k2 >= k) ++k2;

  std::vector<int> items = members(st, a, k, k2);
  if (items.empty()) {
    out.accepted = true;
    return out;
  }
  std::shuffle(items.begin(), items.end(), rng);

  std::vector<int> current(items.size());
  for (std::size_t t = 0; t < items.size(); ++t) current[t] = st.label(a, items[t]) == k2 ? 1 : 0;

  const auto reverse = allocate_sequentially(st, a, items, current, nullptr);
  const auto forward = allocate_sequentially(st, a, items, {}, &rng);

  const double before = st.cluster_log_term(a, k) + st.cluster_log_term(a, k2);
  const double after = forward.cluster_term[0] + forward.cluster_term[1];
  out.log_accept = after - before + reverse.log_prob - forward.log_prob;

  if (std::log(uniform01(rng)) < out.log_accept) {
    out.accepted = true;
    for (std::size_t t = 0; t < items.size(); ++t)
      out.delta += st.move(a, items[t], forward.side[t] ? k2 : k);
  }
  return out;
}

/// log A for splitting a cluster of `merged_size` items (whose log-posterior
/// cluster term is `merged_term`) into two clusters with combined cluster
/// terms `split_terms`, when the axis has K clusters before the split.
inline double split_log_ratio(int K, int bound, double conc, int N, double merged_term,
                              double split_terms, double log_q, const MoveSchedule& sched) {
  const double k = K;
  return -std::log(k + 1.0) + std::lgamma(N + conc * k) - std::lgamma(N + conc * (k + 1.0)) +
         std::lgamma(conc * (k + 1.0)) - std::lgamma(conc) - std::lgamma(conc * k) + split_terms -
         merged_term + std::log1p(-sched.p_split(K + 1, bound)) -
         std::log(sched.p_split(K, bound)) - log_q;
}

/// log A of splitting own-cluster k with the given processing order and sides
/// (side 1 goes to the new cluster).
template <class Model>
double evaluate_split(const AllocationState<Model>& st, Axis a, int k, std::span<const int> order,
                      std::span<const int> sides, const MoveSchedule& sched,
                      SequentialAllocation* record = nullptr) {
  const auto seq = allocate_sequentially(st, a, order, sides, nullptr);
  if (record) *record = seq;
  return split_log_ratio(st.clusters(a), st.capacity(a), st.concentration(a), st.items(a),
                         st.cluster_log_term(a, k), seq.cluster_term[0] + seq.cluster_term[1],
                         seq.log_prob, sched);
}

/// log A of the split that would undo merging own-cluster `absorb` into `keep`
/// (items processed in `order`). The combine is accepted with min(1, 1/A).
template <class Model>
double evaluate_combine(const AllocationState<Model>& st, Axis a, int keep, int absorb,
                        std::span<const int> order, const MoveSchedule& sched) {
  std::vector<int> sides(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) sides[t] = st.label(a, order[t]) == absorb ? 1 : 0;
  const auto seq = allocate_sequentially(st, a, order, sides, nullptr);

  const Axis b = opposite(a);
  const int merged_size = st.size(a, keep) + st.size(a, absorb);
  double merged_term = std::lgamma(merged_size + st.concentration(a));
  for (int h = 0; h < st.clusters(b); ++h) {
    const BlockStats p = st.oriented_block(a, keep, h);
    const BlockStats q = st.oriented_block(a, absorb, h);
    merged_term += st.model().log_marginal(p.count + q.count, p.sum + q.sum, p.sumsq + q.sumsq);
  }
  return split_log_ratio(st.clusters(a) - 1, st.capacity(a), st.concentration(a), st.items(a),
                         merged_term, seq.cluster_term[0] + seq.cluster_term[1], seq.log_prob,
                         sched);
}

/// Split/combine move. A split picks a cluster k, allocates its shuffled
/// members sequentially between k and a new cluster K, then swaps label K with
/// a uniformly chosen label in 0..K. A combine picks an ordered pair (k, k'),
/// merges k' into k and shifts the labels above k' down.
template <class Model>
MoveOutcome split_combine(AllocationState<Model>& st, Axis a, const MoveSchedule& sched,
                          Rng& rng, bool* was_split = nullptr) {
  MoveOutcome out;
  const int K = st.clusters(a);
  const bool split = uniform01(rng) < sched.p_split(K, st.capacity(a));
  if (was_split) *was_split = split;

  if (split) {
    const int k = uniform_int(rng, K);
    std::vector<int> items = members(st, a, k);
    std::shuffle(items.begin(), items.end(), rng);
    const auto seq = allocate_sequentially(st, a, items, {}, &rng);
    const int swap_with = uniform_int(rng, K + 1);
    out.log_accept = split_log_ratio(K, st.capacity(a), st.concentration(a), st.items(a),
                                     st.cluster_log_term(a, k),
                                     seq.cluster_term[0] + seq.cluster_term[1], seq.log_prob, sched);
    if (std::log(uniform01(rng)) < out.log_accept) {
      out.accepted = true;
      const double before = st.log_posterior();
      st.add_cluster(a);
      for (std::size_t t = 0; t < items.size(); ++t)
        if (seq.side[t]) st.move(a, items[t], K);
      st.swap_labels(a, K, swap_with);
      out.delta = st.log_posterior() - before;
    }
    return out;
  }

  if (K < 2) return out;
  const int keep = uniform_int(rng, K);
  int absorb = uniform_int(rng, K - 1);
  if (absorb >= keep) ++absorb;
  std::vector<int> items = members(st, a, keep, absorb);
  std::shuffle(items.begin(), items.end(), rng);
  const double log_split = evaluate_combine(st, a, keep, absorb, items, sched);
  out.log_accept = -log_split;
  if (std::log(uniform01(rng)) < out.log_accept) {
    out.accepted = true;
    const double before = st.log_posterior();
    for (int i : items)
      if (st.label(a, i) == absorb) st.move(a, i, keep);
    st.remove_cluster(a, absorb);
    out.delta = st.log_posterior() - before;
  }
  return out;
}

/// One full sweep over both axes; updates the acceptance counters.
template <class Model>
void sweep(AllocationState<Model>& st, const MoveSchedule& sched, Rng& rng,
           AcceptanceReport& acc) {
  for (Axis a : {Axis::Rows, Axis::Cols}) {
    const int ax = index(a);
    for (int i = 0; i < st.items(a); ++i) {
      if (st.clusters(a) == 1) break;
      ++acc.single[ax].proposed;
      if (sched.gibbs_fraction >= 1.0 || uniform01(rng) < sched.gibbs_fraction) {
        gibbs_update(st, a, i, rng);
        ++acc.single[ax].accepted;
      } else if (metropolis_update(st, a, i, rng)) {
        ++acc.single[ax].accepted;
      }
    }
  }
  for (Axis a : {Axis::Rows, Axis::Cols}) {
    if (st.clusters(a) < 2) continue;
    auto& c = acc.reallocate[index(a)];
    ++c.proposed;
    c.accepted += reallocate(st, a, rng).accepted;
  }
  for (Axis a : {Axis::Rows, Axis::Cols}) {
    bool was_split = false;
    const bool ok = split_combine(st, a, sched, rng, &was_split).accepted;
    auto& c = was_split ? acc.split[index(a)] : acc.combine[index(a)];
    ++c.proposed;
    c.accepted += ok;
  }
}

}  // namespace lbm
