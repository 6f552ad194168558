#include "lbm/assignment.hpp"
#include "lbm/relabel.hpp"
#include "lbm/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace lbm;

TEST_SUITE("processing order") {
  TEST_CASE("fewer non-empty components first") {
    const std::vector<LabelVector> in = {{3, 3, 2, 2, 0, 1}, {2, 2, 1, 1, 1, 0}};
    const auto out = sort_for_processing(in);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == in[1]);
    CHECK(out[1] == in[0]);
  }

  TEST_CASE("equal counts keep chain order") {
    const std::vector<LabelVector> in = {{0, 1, 1}, {1, 0, 0}, {1, 1, 0}, {0, 0, 1}};
    CHECK(sort_for_processing(in) == in);
    const std::vector<LabelVector> one = {{2, 0, 1}};
    CHECK(sort_for_processing(one) == one);
  }

  TEST_CASE("empty labels do not count") {
    // labels 0 and 5 only: two components, even though the label range is 6
    const std::vector<LabelVector> in = {{0, 1, 2}, {0, 5, 5}, {1, 1, 1}};
    const auto order = processing_order(in);
    CHECK(order == std::vector<std::size_t>{2, 1, 0});
  }
}

TEST_SUITE("assignment") {
  TEST_CASE("identity when the diagonal is strictly smallest") {
    Eigen::MatrixXd c(3, 3);
    c << 0, 4, 5, 3, 1, 6, 7, 8, 2;
    const Assignment a = solve_assignment(c);
    CHECK(a.of_row == std::vector<int>{0, 1, 2});
    CHECK(a.cost == 3.0);
  }

  TEST_CASE("2x2 swap") {
    Eigen::MatrixXd c(2, 2);
    c << 5, 1, 1, 5;
    const Assignment a = solve_assignment(c);
    CHECK(a.of_row == std::vector<int>{1, 0});
    CHECK(a.cost == 2.0);
  }

  TEST_CASE("matches exhaustive search, ties included") {
    Rng rng(21);
    for (int K = 1; K <= 6; ++K)
      for (int rep = 0; rep < 60; ++rep) {
        // small value range forces many tied optima
        const int range = rep % 2 ? 3 : 50;
        Eigen::MatrixXd c(K, K);
        for (int r = 0; r < K; ++r)
          for (int s = 0; s < K; ++s) c(r, s) = uniform_int(rng, range);
        double best = 0;
        const auto perm = oracle::brute_force_assignment(c, &best);
        const Assignment a = solve_assignment(c);
        CHECK(a.cost == best);
        CHECK(a.of_row == perm);
      }
  }

  TEST_CASE("bad input") {
    CHECK_THROWS_AS(solve_assignment(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = -1;
    CHECK_THROWS_AS(solve_assignment(c), std::invalid_argument);
    c(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_assignment(c), std::invalid_argument);
  }
}

TEST_SUITE("relabeler") {
  TEST_CASE("stable labels give the closed-form costs") {
    const LabelVector z = {0, 0, 1, 2, 2, 2, 1};
    const int n = 7;
    Relabeler r(n);
    for (int T = 1; T <= 5; ++T) {
      if (T > 1) {
        const Eigen::MatrixXd c = r.cost_matrix(z);
        for (int k = 0; k < 3; ++k) {
          const int nk = static_cast<int>(std::count(z.begin(), z.end(), k));
          for (int k2 = 0; k2 < 3; ++k2)
            CHECK(c(k, k2) == (k == k2 ? (n - nk) * (T - 1) : n * (T - 1)));
        }
      }
      CHECK(r.relabel(z) == z);
    }
  }

  TEST_CASE("S-matrix costs equal the direct double sum") {
    Rng rng(22);
    const int n = 15;
    Relabeler r(n);
    std::vector<LabelVector> seen;
    for (int t = 0; t < 30; ++t) {
      LabelVector z(n);
      for (int& l : z) l = uniform_int(rng, 3);
      if (!seen.empty()) {
        const Eigen::MatrixXd c = r.cost_matrix(z);
        for (int k1 = 0; k1 < 3; ++k1)
          for (int k2 = 0; k2 < 3; ++k2) {
            // sum_t sum_i (1 - [z_i^(t) = k1][z_i = k2])
            double direct = 0;
            for (const auto& prev : seen)
              for (int i = 0; i < n; ++i) direct += 1.0 - (prev[i] == k1 && z[i] == k2 ? 1.0 : 0.0);
            CHECK(c(k1, k2) == direct);
          }
      }
      seen.push_back(r.relabel(z));
    }
  }

  TEST_CASE("permuted copies of one clustering collapse to the reference") {
    Rng rng(23);
    const int n = 40, K = 5;
    LabelVector truth(n);
    for (int i = 0; i < n; ++i) truth[i] = i % K;
    std::shuffle(truth.begin(), truth.end(), rng);
    Relabeler r(n);
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    for (int t = 0; t < 50; ++t) {
      if (t) std::shuffle(perm.begin(), perm.end(), rng);
      LabelVector z(n);
      for (int i = 0; i < n; ++i) z[i] = perm[truth[i]];
      const LabelVector out = r.relabel(z);
      CHECK(out == truth);
    }
    // every item carries all its mass on one label
    for (int i = 0; i < n; ++i) CHECK(r.counts()(truth[i], i) == 50);
  }

  TEST_CASE("S columns sum to the number processed") {
    Rng rng(24);
    Relabeler r(12);
    for (int t = 0; t < 25; ++t) {
      LabelVector z(12);
      for (int& l : z) l = uniform_int(rng, 4);
      r.relabel(z);
      for (int i = 0; i < 12; ++i) CHECK(r.counts().col(i).sum() == r.processed());
    }
    CHECK(r.processed() == 25);
  }

  TEST_CASE("relabelling is a bijection of the labels in use") {
    Rng rng(25);
    Relabeler r(20);
    for (int t = 0; t < 40; ++t) {
      LabelVector z(20);
      for (int& l : z) l = uniform_int(rng, 3);
      const LabelVector out = r.relabel(z);
      // same partition
      CHECK(oracle::canonical(out) == oracle::canonical(z));
    }
  }

  TEST_CASE("cost matrix needs a reference") {
    Relabeler r(3);
    const LabelVector z = {0, 1, 0};
    CHECK_THROWS(r.cost_matrix(z));
  }
}
