#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace smdr {

double normal_pdf(double z, double mean = 0.0, double sd = 1.0);
double normal_cdf(double z);
// 2 * (1 - Phi(|z|)), computed without cancellation.
double two_sided_p(double z);

enum class NullKind { Theoretical, Empirical };

struct NormalComponent {
  double weight;
  double mean;
  double sd;
};

// Null density f0 (standard or empirical normal) and an alternative f1
// represented as a finite normal mixture. The mixture is exact; f1_grid is
// its tabulation on an evenly spaced abscissa, kept for diagnostics and the
// normalization invariant.
class DensityModel {
 public:
  static DensityModel theoretical_null();
  static DensityModel empirical_null(double mu0, double sigma0);

  // Returns a copy with the alternative replaced by `components` (weights
  // are renormalized) and tabulated on [lo, hi] with `points` abscissae.
  DensityModel with_alternative(std::vector<NormalComponent> components,
                                double lo, double hi,
                                std::size_t points = 1000) const;

  NullKind null_kind() const noexcept { return null_kind_; }
  double mu0() const noexcept { return mu0_; }
  double sigma0() const noexcept { return sigma0_; }

  bool has_alternative() const noexcept { return !components_.empty(); }
  const std::vector<NormalComponent>& components() const noexcept {
    return components_;
  }

  double null_density(double z) const;
  double alt_density(double z) const;

  const std::vector<double>& f1_grid() const noexcept { return f1_grid_; }
  double abscissa_lo() const noexcept { return lo_; }
  double abscissa_hi() const noexcept { return hi_; }
  double abscissa_step() const noexcept { return step_; }
  double f1_integral() const;

  // Prior mass the estimator assigned to the alternative (1 for models built
  // directly from components).
  double alt_weight() const noexcept { return alt_weight_; }
  void set_alt_weight(double w) noexcept { alt_weight_ = w; }

 private:
  NullKind null_kind_ = NullKind::Theoretical;
  double mu0_ = 0.0;
  double sigma0_ = 1.0;
  std::vector<NormalComponent> components_;
  std::vector<double> f1_grid_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double step_ = 0.0;
  double alt_weight_ = 1.0;
};

// Fits mu0/sigma0 by matching the mean and variance of the observations
// inside the central [Phi(-1), Phi(1)] quantile band to those of a normal
// truncated at +-1 sd.
DensityModel estimate_empirical_null(std::span<const double> z);

struct PredictiveRecursionOptions {
  std::size_t sweeps = 10;
  std::size_t grid_points = 1000;
  double decay = 0.67;
  double initial_null_prob = 0.9;
  std::uint64_t seed = 0;
};

// Predictive recursion for the mixing density of the alternative, a
// location mixture of the null's kernel. Each sweep visits the data in a
// fresh seeded random order; the weight sequence is (t + 1)^-decay with t
// counted across sweeps.
DensityModel estimate_alt_density(std::span<const double> z,
                                  const DensityModel& model_in,
                                  const PredictiveRecursionOptions& opts = {});

inline DensityModel estimate_alt_density(std::span<const double> z,
                                         const DensityModel& model_in,
                                         std::size_t sweeps,
                                         std::uint64_t seed) {
  PredictiveRecursionOptions opts;
  opts.sweeps = sweeps;
  opts.seed = seed;
  return estimate_alt_density(z, model_in, opts);
}

// Empirical-characteristic-function estimate of the null fraction, for a
// N(mu0, sigma0^2) null.
double estimate_null_proportion(std::span<const double> z, double mu0 = 0.0,
                                double sigma0 = 1.0);

// Gaussian KDE with Silverman's bandwidth, linearly binned onto a grid and
// evaluated by interpolation.
class KernelDensity {
 public:
  explicit KernelDensity(std::span<const double> z, std::size_t bins = 2048);
  double operator()(double z) const;
  double bandwidth() const noexcept { return bandwidth_; }

 private:
  double lo_ = 0.0;
  double step_ = 0.0;
  double bandwidth_ = 0.0;
  std::vector<double> density_;
};

}  // namespace smdr
