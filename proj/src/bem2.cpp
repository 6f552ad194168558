#include "lbm/bem2.hpp"

#include "lbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lbm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// x log y with the 0 log 0 = 0 convention.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double entropy_term(const MatrixXd& p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) acc += xlogy(p.data()[i], p.data()[i]);
  return acc;
}

double weight_term(const MatrixXd& p, const VectorXd& weights) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index k = 0; k < p.cols(); ++k) acc += xlogy(p(i, k), weights(k));
  return acc;
}

// score(i, c) = sum_h sum_j W(j, h) log p(Y(i, j) | param(c, h)).
MatrixXd score(bool binary, const MatrixXd& Y, const MatrixXd& W, const MatrixXd& theta,
               const MatrixXd& sigma2) {
  const MatrixXd YW = Y * W;
  const Eigen::RowVectorXd wsum = W.colwise().sum();
  if (binary) {
    const MatrixXd l1 = theta.array().log();
    const MatrixXd l0 = (1.0 - theta.array()).log();
    const MatrixXd rest = (-YW).rowwise() + wsum;
    return YW * l1.transpose() + rest * l0.transpose();
  }
  const MatrixXd Y2W = Y.array().square().matrix() * W;
  const MatrixXd inv = sigma2.array().inverse();
  const VectorXd constant =
      ((-0.5 * (2.0 * std::numbers::pi * sigma2.array()).log() -
        0.5 * theta.array().square() * inv.array())
           .rowwise() *
       wsum.array())
          .rowwise()
          .sum();
  MatrixXd out = Y2W * (-0.5 * inv).transpose() + YW * (theta.array() * inv.array()).matrix().transpose();
  out.rowwise() += constant.transpose();
  return out;
}

// p(i, .) proportional to weights * exp(sc(i, .)).
void normalise_memberships(MatrixXd& p, const MatrixXd& sc, const VectorXd& weights) {
  const VectorXd logw = weights.array().log();
  for (Eigen::Index i = 0; i < sc.rows(); ++i) {
    Eigen::RowVectorXd row = sc.row(i) + logw.transpose();
    const double mx = row.maxCoeff();
    row = (row.array() - mx).exp();
    p.row(i) = row / row.sum();
  }
}

MatrixXd values(const DataMatrix& data) { return data.values(); }

void fit_blocks(FuzzyState& st, const MatrixXd& Y, bool binary) {
  const MatrixXd N = st.s.colwise().sum().transpose() * st.t.colwise().sum();
  const MatrixXd S1 = st.s.transpose() * Y * st.t;
  MatrixXd S2;
  if (!binary) S2 = st.s.transpose() * Y.array().square().matrix() * st.t;
  for (Eigen::Index k = 0; k < N.rows(); ++k)
    for (Eigen::Index g = 0; g < N.cols(); ++g) {
      if (!(N(k, g) > 0.0)) continue;  // no weight on this block: keep the previous value
      const double mean = S1(k, g) / N(k, g);
      if (binary) {
        st.theta(k, g) = std::clamp(mean, kThetaClamp, 1.0 - kThetaClamp);
      } else {
        st.theta(k, g) = mean;
        st.sigma2(k, g) = std::max(S2(k, g) / N(k, g) - mean * mean, kVarianceFloor);
      }
    }
}

void check_finite(double v, const char* where) {
  if (!std::isfinite(v))
    throw NumericalDegeneracy(std::string("BEM2 criterion became non-finite ") + where);
}

}  // namespace

double complete_log_likelihood(const FuzzyState& st, const DataMatrix& data) {
  const bool binary = data.variant() == Variant::Binary;
  const MatrixXd sc = score(binary, values(data), st.t, st.theta, st.sigma2);
  return weight_term(st.s, st.omega) + weight_term(st.t, st.rho) + (st.s.array() * sc.array()).sum();
}

double bem2_criterion(const FuzzyState& st, const DataMatrix& data) {
  return complete_log_likelihood(st, data) - entropy_term(st.s) - entropy_term(st.t);
}

void update_parameters(FuzzyState& st, const DataMatrix& data) {
  st.omega = st.s.colwise().mean().transpose();
  st.rho = st.t.colwise().mean().transpose();
  if (st.theta.rows() != st.K() || st.theta.cols() != st.G()) {
    st.theta = MatrixXd::Constant(st.K(), st.G(), 0.5);
    st.sigma2 = MatrixXd::Ones(st.K(), st.G());
  }
  fit_blocks(st, values(data), data.variant() == Variant::Binary);
}

FuzzyState random_fuzzy_state(const DataMatrix& data, int K, int G, Rng& rng) {
  if (K < 1 || G < 1 || K > data.rows() || G > data.cols())
    throw std::invalid_argument("BEM2 needs 1 <= K <= n and 1 <= G <= m");
  std::exponential_distribution<double> gamma1(1.0);  // Gamma(1) marginals give Dirichlet(1)
  auto draw = [&](int items, int clusters) {
    MatrixXd p(items, clusters);
    for (int i = 0; i < items; ++i) {
      for (int c = 0; c < clusters; ++c) p(i, c) = gamma1(rng);
      p.row(i) /= p.row(i).sum();
    }
    return p;
  };
  FuzzyState st;
  st.s = draw(data.rows(), K);
  st.t = draw(data.cols(), G);
  update_parameters(st, data);
  return st;
}

Bem2Fit bem2_iterate(const DataMatrix& data, FuzzyState st, double tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) throw std::invalid_argument("BEM2 needs tol > 0 and max_iter >= 1");
  const bool binary = data.variant() == Variant::Binary;
  const MatrixXd Y = values(data);
  const MatrixXd Yt = Y.transpose();

  Bem2Fit fit;
  double current = bem2_criterion(st, data);
  check_finite(current, "at initialisation");
  fit.history.push_back(current);
  for (int it = 1; it <= max_iter; ++it) {
    // Row step: s, then omega, then block parameters.
    normalise_memberships(st.s, score(binary, Y, st.t, st.theta, st.sigma2), st.omega);
    st.omega = st.s.colwise().mean().transpose();
    fit_blocks(st, Y, binary);
    fit.history.push_back(bem2_criterion(st, data));
    check_finite(fit.history.back(), "after a row step");

    // Column step.
    normalise_memberships(st.t,
                          score(binary, Yt, st.s, st.theta.transpose(), st.sigma2.transpose()),
                          st.rho);
    st.rho = st.t.colwise().mean().transpose();
    fit_blocks(st, Y, binary);
    const double next = bem2_criterion(st, data);
    check_finite(next, "after a column step");
    fit.history.push_back(next);

    fit.iterations = it;
    const double change = std::abs(next - current);
    current = next;
    if (change < tol) {
      fit.converged = true;
      break;
    }
  }

  fit.criterion = current;
  fit.state = std::move(st);
  auto argmax = [](const MatrixXd& p) {
    std::vector<int> out(p.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      Eigen::Index best = 0;
      p.row(i).maxCoeff(&best);
      out[i] = static_cast<int>(best);
    }
    return out;
  };
  fit.row_assign = argmax(fit.state.s);
  fit.col_assign = argmax(fit.state.t);
  const int K = fit.state.K(), G = fit.state.G();
  fit.hard_log_likelihood = hard_log_likelihood(data, fit.row_assign, K, fit.col_assign, G);
  fit.parameter_count = aic3_parameter_count(data.rows(), data.cols(), K, G, binary ? 1 : 2);
  fit.aic3 = -2.0 * fit.hard_log_likelihood + 3.0 * static_cast<double>(fit.parameter_count);
  return fit;
}

Bem2Fit bem2_fit(const DataMatrix& data, const Bem2Options& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("BEM2 needs at least one restart");
  Rng rng(opts.seed);
  Bem2Fit best;
  for (int r = 0; r < opts.restarts; ++r) {
    Bem2Fit fit = bem2_iterate(data, random_fuzzy_state(data, opts.K, opts.G, rng), opts.tol, opts.max_iter);
    fit.restart = r;
    if (r == 0 || fit.criterion > best.criterion) best = std::move(fit);
  }
  return best;
}

long aic3_parameter_count(long n, long m, long K, long G, long d) {
  if (n < 1 || m < 1 || K < 1 || G < 1 || d < 1)
    throw std::invalid_argument("AIC-3 parameter count needs positive arguments");
  return n * (K - 1) + m * (G - 1) + d * K * G + (K - 1) + (G - 1);
}

double hard_log_likelihood(const DataMatrix& data, const std::vector<int>& z, int K,
                           const std::vector<int>& w, int G) {
  const int n = data.rows(), m = data.cols();
  if (static_cast<int>(z.size()) != n || static_cast<int>(w.size()) != m)
    throw std::invalid_argument("assignment lengths do not match the data");
  Eigen::VectorXd nk = VectorXd::Zero(K), mg = VectorXd::Zero(G);
  MatrixXd S = MatrixXd::Zero(K, G), SS = MatrixXd::Zero(K, G);
  for (int i = 0; i < n; ++i) nk(z[i]) += 1.0;
  for (int j = 0; j < m; ++j) mg(w[j]) += 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double y = data(i, j);
      S(z[i], w[j]) += y;
      SS(z[i], w[j]) += y * y;
    }

  double ll = 0.0;
  for (int k = 0; k < K; ++k) ll += xlogy(nk(k), nk(k) / n);
  for (int g = 0; g < G; ++g) ll += xlogy(mg(g), mg(g) / m);
  for (int k = 0; k < K; ++k)
    for (int g = 0; g < G; ++g) {
      const double N = nk(k) * mg(g);
      if (N == 0.0) continue;
      const double mean = S(k, g) / N;
      if (data.variant() == Variant::Binary) {
        const double th = std::clamp(mean, kThetaClamp, 1.0 - kThetaClamp);
        ll += S(k, g) * std::log(th) + (N - S(k, g)) * std::log(1.0 - th);
      } else {
        const double var = std::max(SS(k, g) / N - mean * mean, kVarianceFloor);
        const double rss = SS(k, g) - 2.0 * mean * S(k, g) + N * mean * mean;
        ll += -0.5 * N * std::log(2.0 * std::numbers::pi * var) - 0.5 * rss / var;
      }
    }
  return ll;
}

}  // namespace lbm
