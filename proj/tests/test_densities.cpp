#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "smdr/densities.hpp"
#include "smdr/errors.hpp"

using namespace smdr;

namespace {

std::vector<double> mixture_draws(std::size_t n, double signal_frac, double mean,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution is_signal(signal_frac);
  std::vector<double> z(n);
  for (auto& v : z) v = noise(rng) + (is_signal(rng) ? mean : 0.0);
  return z;
}

double alt_mode(const DensityModel& m) {
  double best = m.abscissa_lo(), best_v = -1.0;
  for (double x = m.abscissa_lo(); x <= m.abscissa_hi(); x += 0.01) {
    const double v = m.alt_density(x);
    if (v > best_v) {
      best_v = v;
      best = x;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("theoretical null density values") {
  const DensityModel m = DensityModel::theoretical_null();
  CHECK(m.null_density(0.0) == doctest::Approx(0.3989423).epsilon(1e-7));
  CHECK(m.null_density(1.96) == doctest::Approx(0.0584410).epsilon(1e-6));
  for (double z : {-3.0, -0.4, 0.7, 1.96, 5.0}) {
    CHECK(m.null_density(z) == doctest::Approx(oracle::normal_pdf(z)).epsilon(1e-14));
  }
}

TEST_CASE("empirical null density at its mean") {
  const DensityModel m = DensityModel::empirical_null(0.1, 1.2);
  CHECK(m.null_density(0.1) == doctest::Approx(0.3324519).epsilon(1e-7));
  CHECK(m.null_density(1.3) == doctest::Approx(oracle::normal_pdf(1.3, 0.1, 1.2)).epsilon(1e-14));
  CHECK_THROWS_AS(DensityModel::empirical_null(0.0, 0.0), Error);
}

TEST_CASE("normal tail helpers") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(two_sided_p(-1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(two_sided_p(0.0) == doctest::Approx(1.0));
  CHECK(two_sided_p(10.0) > 0.0);
}

TEST_CASE("empirical null recovers location and scale") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.4, 1.3);
  std::vector<double> z(20000);
  for (auto& v : z) v = d(rng);
  const DensityModel m = estimate_empirical_null(z);
  CHECK(m.null_kind() == NullKind::Empirical);
  CHECK(m.mu0() == doctest::Approx(0.4).epsilon(0.05));
  CHECK(m.sigma0() == doctest::Approx(1.3).epsilon(0.04));
}

TEST_CASE("predictive recursion finds the shifted component") {
  const auto z = mixture_draws(5000, 0.05, 3.0, 11);
  const DensityModel m = estimate_alt_density(z, DensityModel::theoretical_null(), 10, 0);
  const double mode = alt_mode(m);
  CHECK(mode >= 2.0);
  CHECK(mode <= 4.0);
  CHECK(m.f1_integral() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("predictive recursion on pure noise leaves little alternative mass") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> z(5000);
  for (auto& v : z) v = d(rng);
  const DensityModel m = estimate_alt_density(z, DensityModel::theoretical_null(), 10, 0);
  CHECK(m.alt_weight() < 0.10);
}

TEST_CASE("sweep count keeps abscissa and normalization") {
  const auto z = mixture_draws(2000, 0.1, 2.5, 21);
  const DensityModel a = estimate_alt_density(z, DensityModel::theoretical_null(), 1, 4);
  const DensityModel b = estimate_alt_density(z, DensityModel::theoretical_null(), 10, 4);
  CHECK(a.abscissa_lo() == b.abscissa_lo());
  CHECK(a.abscissa_hi() == b.abscissa_hi());
  CHECK(a.abscissa_step() == b.abscissa_step());
  CHECK(a.f1_grid().size() == b.f1_grid().size());
  CHECK(a.f1_integral() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(b.f1_integral() == doctest::Approx(1.0).epsilon(0.01));
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  CHECK(a.abscissa_lo() <= *lo - 1.0);
  CHECK(a.abscissa_hi() >= *hi + 1.0);
  for (double v : b.f1_grid()) CHECK(v >= 0.0);
}

TEST_CASE("predictive recursion is deterministic under a seed") {
  const auto z = mixture_draws(1000, 0.1, 2.5, 8);
  const DensityModel a = estimate_alt_density(z, DensityModel::theoretical_null(), 3, 9);
  const DensityModel b = estimate_alt_density(z, DensityModel::theoretical_null(), 3, 9);
  CHECK(a.f1_grid() == b.f1_grid());
  CHECK(a.alt_weight() == b.alt_weight());
}

TEST_CASE("predictive recursion input checks") {
  const std::vector<double> empty;
  CHECK_THROWS_AS(estimate_alt_density(empty, DensityModel::theoretical_null(), 10, 0), Error);
  const std::vector<double> tiny(50, 0.3);
  CHECK_THROWS_AS(estimate_alt_density(tiny, DensityModel::theoretical_null(), 10, 0), Error);
  const auto z = mixture_draws(500, 0.1, 2.5, 1);
  CHECK_THROWS_AS(estimate_alt_density(z, DensityModel::theoretical_null(), 0, 0), Error);
}

TEST_CASE("larger samples do not worsen the alternative mode on average") {
  double err_small = 0.0, err_large = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto small = mixture_draws(5000, 0.05, 3.0, 100 + s);
    const auto large = mixture_draws(10000, 0.05, 3.0, 100 + s);
    err_small += std::abs(alt_mode(estimate_alt_density(small, DensityModel::theoretical_null(), 10, s)) - 3.0);
    err_large += std::abs(alt_mode(estimate_alt_density(large, DensityModel::theoretical_null(), 10, s)) - 3.0);
  }
  CHECK(err_large / seeds <= err_small / seeds + 0.02);
}

TEST_CASE("null proportion on pure noise") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> z(10000);
  for (auto& v : z) v = d(rng);
  const double pi0 = estimate_null_proportion(z);
  CHECK(pi0 >= 0.95);
  CHECK(pi0 <= 1.0);
}

TEST_CASE("null proportion with a tenth shifted") {
  const auto z = mixture_draws(10000, 0.1, 3.0, 17);
  const double s_hat = z.size() * (1.0 - estimate_null_proportion(z));
  const double ratio = s_hat / 1000.0;
  CHECK(ratio >= 0.6);
  CHECK(ratio <= 1.1);
}

TEST_CASE("null proportion rejects constant input") {
  const std::vector<double> z(200, 1.5);
  CHECK_THROWS_AS(estimate_null_proportion(z), Error);
}

TEST_CASE("kernel density integrates to one") {
  const auto z = mixture_draws(3000, 0.1, 3.0, 4);
  const KernelDensity kde(z);
  CHECK(kde.bandwidth() > 0.0);
  double total = 0.0;
  const double h = 0.01;
  for (double x = -10.0; x <= 14.0; x += h) total += kde(x) * h;
  CHECK(total == doctest::Approx(1.0).epsilon(0.01));
  CHECK(kde(0.0) > kde(6.0));
}
