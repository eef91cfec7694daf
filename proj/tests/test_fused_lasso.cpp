#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "smdr/errors.hpp"
#include "smdr/fused_lasso.hpp"

using namespace smdr;

TEST_CASE("zero penalty returns the data") {
  const std::vector<double> y{0.3, -1.2, 4.0, 2.5};
  const std::vector<double> w{1.0, 2.0, 0.5, 3.0};
  const auto x = fused_lasso_1d(y, w, 0.0);
  for (std::size_t t = 0; t < y.size(); ++t) CHECK(x[t] == doctest::Approx(y[t]).epsilon(1e-12));
}

TEST_CASE("huge penalty fuses to the weighted mean") {
  const std::vector<double> y{0.3, -1.2, 4.0, 2.5, 0.0};
  const std::vector<double> w{1.0, 2.0, 0.5, 3.0, 1.5};
  double sw = 0.0, swy = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    sw += w[t];
    swy += w[t] * y[t];
  }
  const auto x = fused_lasso_1d(y, w, sw * 5.2);
  for (double v : x) CHECK(v == doctest::Approx(swy / sw).epsilon(1e-10));
}

TEST_CASE("alternating sequence matches the enumeration oracle") {
  const std::vector<double> y{0, 1, 0, 1, 0, 1};
  const std::vector<double> w(6, 1.0);
  const auto x = fused_lasso_1d(y, w, 0.3);
  const auto ref = oracle::fused_lasso_brute(y, w, 0.3);
  for (std::size_t t = 0; t < y.size(); ++t) CHECK(x[t] == doctest::Approx(ref[t]).epsilon(1e-9));
}

TEST_CASE("random instances match the enumeration oracle") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(1, 8);
  std::normal_distribution<double> val(0.0, 2.0);
  std::uniform_real_distribution<double> wt(0.2, 3.0);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = len(rng);
    std::vector<double> y(n), w(n);
    for (int t = 0; t < n; ++t) {
      y[t] = val(rng);
      w[t] = wt(rng);
    }
    for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
      const auto x = fused_lasso_1d(y, w, lambda);
      const auto ref = oracle::fused_lasso_brute(y, w, lambda);
      for (int t = 0; t < n; ++t) CHECK(std::abs(x[t] - ref[t]) < 1e-6);
    }
  }
}

TEST_CASE("solver object agrees with the free function") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> val(0.0, 1.0);
  std::vector<double> y(40), ones(40, 1.0), out(40);
  for (auto& v : y) v = val(rng);
  FusedLassoSolver solver;
  solver.solve_unit(y, 0.7, out);
  const auto ref = fused_lasso_1d(y, ones, 0.7);
  for (std::size_t t = 0; t < y.size(); ++t) CHECK(out[t] == doctest::Approx(ref[t]).epsilon(1e-12));
}

TEST_CASE("nonpositive weights are rejected") {
  const std::vector<double> y{1.0, 2.0};
  CHECK_THROWS_AS(fused_lasso_1d(y, std::vector<double>{1.0, 0.0}, 0.5), Error);
  CHECK_THROWS_AS(fused_lasso_1d(y, std::vector<double>{1.0, -1.0}, 0.5), Error);
  CHECK_THROWS_AS(fused_lasso_1d(y, std::vector<double>{1.0}, 0.5), Error);
}
