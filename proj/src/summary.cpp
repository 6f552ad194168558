#include "lbm/summary.hpp"

#include "lbm/relabel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lbm {

double PmpTable::probability(int K, int G) const {
  for (const auto& e : entries)
    if (e.K == K && e.G == G) return e.probability;
  return 0.0;
}

PmpTable pmp_table(std::span<const Sample> samples, bool count_nonempty) {
  if (samples.empty()) throw std::invalid_argument("posterior model probabilities need samples");
  std::map<std::pair<int, int>, long> visits;
  for (const auto& s : samples) {
    if (count_nonempty)
      ++visits[{s.k_nonempty, s.g_nonempty}];
    else
      ++visits[{s.alloc.K, s.alloc.G}];
  }
  PmpTable table;
  table.total = static_cast<long>(samples.size());
  for (const auto& [model, count] : visits)
    table.entries.push_back({model.first, model.second, count,
                             static_cast<double>(count) / static_cast<double>(table.total)});
  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [](const PmpEntry& a, const PmpEntry& b) { return a.visits > b.visits; });
  return table;
}

IatEstimate integrated_autocorrelation_time(std::span<const double> series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) throw std::invalid_argument("IAT needs a series of at least 100 values");
  IatEstimate out;
  out.length = n;

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  auto autocov = [&](long lag) {
    double acc = 0.0;
    for (long t = 0; t + lag < n; ++t) acc += (series[t] - mean) * (series[t + lag] - mean);
    return acc / static_cast<double>(n);
  };

  const double c0 = autocov(0);
  if (!(c0 > 0.0)) {
    out.degenerate = true;
    return out;
  }
  const long max_lag = n / 50;
  double sum = 0.0;
  for (long lag = 1; lag <= max_lag; ++lag) {
    const double rho = autocov(lag) / c0;
    if (rho < 0.05) break;
    sum += rho;
    out.window = static_cast<int>(lag);
  }
  out.tau = 1.0 + 2.0 * sum;
  return out;
}

IatEstimate model_iat(std::span<const Sample> samples, int g_max) {
  std::vector<double> index(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t)
    index[t] = static_cast<double>((samples[t].alloc.K - 1) * g_max + samples[t].alloc.G);
  return integrated_autocorrelation_time(index);
}

std::vector<int> hard_assign(const Eigen::MatrixXd& probs) {
  std::vector<int> out(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    probs.row(i).maxCoeff(&best);  // first maximum
    out[i] = static_cast<int>(best);
  }
  return out;
}

namespace {

Eigen::MatrixXd relabelled_frequencies(const std::vector<LabelVector>& vectors, int items,
                                       int clusters) {
  Relabeler relabeler(items);
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(items, clusters);
  for (const auto& z : sort_for_processing(vectors)) {
    const LabelVector r = relabeler.relabel(z);
    for (int i = 0; i < items; ++i) freq(i, r[i]) += 1.0;
  }
  return freq / static_cast<double>(vectors.size());
}

}  // namespace

MembershipSummary model_summary(std::span<const Sample> samples, int K, int G) {
  std::vector<LabelVector> rows, cols;
  for (const auto& s : samples) {
    if (s.alloc.K != K || s.alloc.G != G) continue;
    rows.push_back(s.alloc.z);
    cols.push_back(s.alloc.w);
  }
  if (rows.empty()) throw std::invalid_argument("model was never visited");

  MembershipSummary out;
  out.K = K;
  out.G = G;
  out.draws = static_cast<long>(rows.size());
  out.row_probs = relabelled_frequencies(rows, static_cast<int>(rows.front().size()), K);
  out.col_probs = relabelled_frequencies(cols, static_cast<int>(cols.front().size()), G);
  out.row_assign = hard_assign(out.row_probs);
  out.col_assign = hard_assign(out.col_probs);
  return out;
}

MembershipSummary modal_summary(std::span<const Sample> samples) {
  const auto table = pmp_table(samples);
  return model_summary(samples, table.modal().K, table.modal().G);
}

const Sample& map_estimate(std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("MAP estimate needs samples");
  std::size_t best = 0;
  for (std::size_t t = 1; t < samples.size(); ++t)
    if (samples[t].log_posterior > samples[best].log_posterior) best = t;
  return samples[best];
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("partitions must cover the same non-empty item set");
  std::map<std::pair<int, int>, long> joint;
  std::map<int, long> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++ra[a[i]];
    ++rb[b[i]];
  }
  auto pairs = [](long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [cell, c] : joint) index += pairs(c);
  for (const auto& [l, c] : ra) sa += pairs(c);
  for (const auto& [l, c] : rb) sb += pairs(c);
  const double total = pairs(static_cast<long>(a.size()));
  const double expected = total > 0.0 ? sa * sb / total : 0.0;
  const double maximum = 0.5 * (sa + sb);
  if (maximum == expected) return 1.0;  // both partitions trivial and identical in shape
  return (index - expected) / (maximum - expected);
}

Crosstab crosstab(std::span<const int> assign, int clusters,
                  std::span<const std::string> annotations) {
  if (assign.size() != annotations.size())
    throw std::invalid_argument("one annotation per item is required");
  Crosstab out;
  std::map<std::string, int> column;
  for (const auto& a : annotations)
    if (column.emplace(a, static_cast<int>(out.categories.size())).second) out.categories.push_back(a);
  out.counts = Eigen::MatrixXi::Zero(clusters, static_cast<int>(out.categories.size()));
  for (std::size_t i = 0; i < assign.size(); ++i) ++out.counts(assign[i], column.at(annotations[i]));
  return out;
}

}  // namespace lbm
