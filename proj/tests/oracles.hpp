#pragma once
// Independent reference computations shared by the unit and acceptance tests.

#include "lbm/data_matrix.hpp"
#include "lbm/posterior.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Beta(a, b) = (a-1)! (b-1)! / (a+b-1)! for positive integers.
inline Rational beta_int(int a, int b) {
  return Rational(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1));
}

/// Integral of theta^s (1-theta)^(c-s) against Beta(gamma, delta), integer shapes.
inline Rational bernoulli_marginal(int count, int s, int gamma, int delta) {
  return beta_int(s + gamma, count - s + delta) / beta_int(gamma, delta);
}

inline double log_of(const Rational& r) {
  const BigFloat num(boost::multiprecision::numerator(r));
  const BigFloat den(boost::multiprecision::denominator(r));
  return static_cast<double>(boost::multiprecision::log(num) - boost::multiprecision::log(den));
}

/// Gamma(aK) / Gamma(a)^K * prod Gamma(n_k + a) / Gamma(n + aK), integer a.
inline Rational dirichlet_multinomial(int a, const std::vector<int>& sizes) {
  const int K = static_cast<int>(sizes.size());
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  Rational r(factorial(a * K - 1), factorial(n + a * K - 1));
  for (int nk : sizes) r *= Rational(factorial(nk + a - 1), factorial(a - 1));
  return r;
}

/// Unnormalised collapsed posterior of a binary matrix, written out factor by
/// factor in exact arithmetic: 1/K! * 1/G! * row and column Dirichlet terms
/// * product of Beta-Bernoulli block marginals. Integer hyperparameters only.
inline Rational binary_posterior(const lbm::Allocation& al, const lbm::DataMatrix& y, int alpha,
                                 int beta, int gamma, int delta) {
  std::vector<int> nk(al.K, 0), mg(al.G, 0);
  for (int k : al.z) ++nk[k];
  for (int g : al.w) ++mg[g];
  Rational r(1, factorial(al.K) * factorial(al.G));
  r *= dirichlet_multinomial(alpha, nk) * dirichlet_multinomial(beta, mg);
  for (int k = 0; k < al.K; ++k)
    for (int g = 0; g < al.G; ++g) {
      int count = 0, s = 0;
      for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j)
          if (al.z[i] == k && al.w[j] == g) {
            ++count;
            s += static_cast<int>(y(i, j));
          }
      r *= bernoulli_marginal(count, s, gamma, delta);
    }
  return r;
}

/// log of the double integral over (mu, sigma2) of
/// N(mu | xi, tau2 sigma2) IG(sigma2 | delta/2, gamma/2) prod_i N(y_i | mu, sigma2),
/// by nested adaptive Gauss-Kronrod quadrature.
inline double gaussian_marginal_quadrature(const std::vector<double>& y, double xi, double tau2,
                                           double delta, double gamma) {
  using boost::math::quadrature::gauss_kronrod;
  const double c = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / c;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var = std::max(var / c, 0.05);

  const double a = delta / 2.0, b = gamma / 2.0;
  auto log_f = [&](double mu, double v) {
    const double s2 = std::exp(v);
    double lf = -0.5 * std::log(2.0 * std::numbers::pi * tau2 * s2) - (mu - xi) * (mu - xi) / (2.0 * tau2 * s2);
    lf += a * std::log(b) - std::lgamma(a) - (a + 1.0) * v - b / s2;
    for (double yi : y) lf += -0.5 * std::log(2.0 * std::numbers::pi * s2) - (yi - mu) * (yi - mu) / (2.0 * s2);
    return lf + v;  // d sigma2 = e^v dv
  };

  // Reference level so the integrand stays near 1 at its peak.
  double ref = -std::numeric_limits<double>::infinity();
  for (int p = -40; p <= 40; ++p)
    for (int q = -60; q <= 60; ++q) ref = std::max(ref, log_f(mean + 0.25 * p, 0.25 * q));

  // In u the mu-integrand is a unit-scale Gaussian bump; in t = v - v0 the tails
  // decay at least like exp(-|t| / 2), so finite ranges lose nothing at double precision.
  auto inner = [&](double v) {
    const double h = std::sqrt(std::exp(v) / (c + 1.0 / tau2));
    auto g = [&](double u) {
      const double lf = log_f(mean + h * u, v);
      return std::isfinite(lf) ? std::exp(lf - ref) * h : 0.0;
    };
    return gauss_kronrod<double, 61>::integrate(g, -40.0, 40.0, 8, 1e-13);
  };
  const double v0 = std::log(var);
  auto outer = [&](double t) { return inner(v0 + t); };
  const double I = gauss_kronrod<double, 61>::integrate(outer, -150.0, 150.0, 15, 1e-12);
  return std::log(I) + ref;
}

/// Labels renumbered by first appearance.
inline std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out;
  for (int l : labels) out.push_back(seen.emplace(l, static_cast<int>(seen.size())).first->second);
  return out;
}

/// Partition class of a state: cluster counts plus canonical row and column partitions.
inline std::string class_key(const lbm::Allocation& al) {
  std::string key = std::to_string(al.K) + "/" + std::to_string(al.G) + ":";
  for (int l : canonical(al.z)) key += static_cast<char>('0' + l);
  key += '|';
  for (int l : canonical(al.w)) key += static_cast<char>('0' + l);
  return key;
}

/// Exact posterior over partition classes of a binary matrix, by summing
/// the rational posterior over every labelled state with K <= k_max, G <= g_max.
inline std::map<std::string, double> class_posterior(const lbm::DataMatrix& y, int k_max, int g_max,
                                                     int alpha, int beta, int gamma, int delta) {
  const int n = y.rows(), m = y.cols();
  std::map<std::string, Rational> mass;
  Rational total = 0;
  for (int K = 1; K <= k_max; ++K)
    for (int G = 1; G <= g_max; ++G) {
      long zc = 1, wc = 1;
      for (int i = 0; i < n; ++i) zc *= K;
      for (int j = 0; j < m; ++j) wc *= G;
      for (long zi = 0; zi < zc; ++zi)
        for (long wi = 0; wi < wc; ++wi) {
          lbm::Allocation al{K, G, std::vector<int>(n), std::vector<int>(m)};
          long t = zi;
          for (int i = 0; i < n; ++i, t /= K) al.z[i] = static_cast<int>(t % K);
          t = wi;
          for (int j = 0; j < m; ++j, t /= G) al.w[j] = static_cast<int>(t % G);
          const Rational p = binary_posterior(al, y, alpha, beta, gamma, delta);
          mass[class_key(al)] += p;
          total += p;
        }
    }
  std::map<std::string, double> out;
  for (const auto& [k, p] : mass) out[k] = static_cast<double>(p / total);
  return out;
}

/// Lexicographically first permutation of minimum total cost, by enumeration.
inline std::vector<int> brute_force_assignment(const Eigen::MatrixXd& cost, double* best_cost = nullptr) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_val = std::numeric_limits<double>::infinity();
  do {
    double v = 0.0;
    for (int r = 0; r < n; ++r) v += cost(r, perm[r]);
    if (v < best_val) {
      best_val = v;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best_cost) *best_cost = best_val;
  return best;
}

/// Long-run variance over marginal variance from non-overlapping batch means.
inline double batch_means_tau(const std::vector<double>& x, std::size_t batch) {
  const std::size_t nb = x.size() / batch;
  const double mean = std::accumulate(x.begin(), x.begin() + nb * batch, 0.0) / (nb * batch);
  double var = 0.0;
  for (std::size_t t = 0; t < nb * batch; ++t) var += (x[t] - mean) * (x[t] - mean);
  var /= static_cast<double>(nb * batch - 1);
  double bvar = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double bm = std::accumulate(x.begin() + b * batch, x.begin() + (b + 1) * batch, 0.0) / batch;
    bvar += (bm - mean) * (bm - mean);
  }
  bvar /= static_cast<double>(nb - 1);
  return static_cast<double>(batch) * bvar / var;
}

}  // namespace oracle
