#include "smdr/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "smdr/errors.hpp"

namespace smdr {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double sample_sd(std::span<const double> z) {
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  return z.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

}  // namespace

double normal_pdf(double z, double mean, double sd) {
  const double u = (z - mean) / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * u * u);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

DensityModel DensityModel::theoretical_null() { return DensityModel{}; }

DensityModel DensityModel::empirical_null(double mu0, double sigma0) {
  require(std::isfinite(mu0), "empirical null mean must be finite");
  require(sigma0 > 0.0 && std::isfinite(sigma0),
          "empirical null sd must be positive");
  DensityModel m;
  m.null_kind_ = NullKind::Empirical;
  m.mu0_ = mu0;
  m.sigma0_ = sigma0;
  return m;
}

DensityModel DensityModel::with_alternative(
    std::vector<NormalComponent> components, double lo, double hi,
    std::size_t points) const {
  require(!components.empty(), "alternative needs at least one component");
  require(hi > lo && points >= 2, "invalid abscissa");
  double total = 0.0;
  for (const auto& c : components) {
    require(c.weight >= 0.0 && c.sd > 0.0, "invalid mixture component");
    total += c.weight;
  }
  require(total > 0.0, "alternative mixture has zero mass");

  DensityModel m = *this;
  m.components_.clear();
  for (auto& c : components) {
    if (c.weight <= 0.0) continue;
    c.weight /= total;
    m.components_.push_back(c);
  }
  m.lo_ = lo;
  m.hi_ = hi;
  m.step_ = (hi - lo) / static_cast<double>(points - 1);
  m.f1_grid_.resize(points);
  for (std::size_t j = 0; j < points; ++j) {
    m.f1_grid_[j] = m.alt_density(lo + m.step_ * static_cast<double>(j));
  }
  return m;
}

double DensityModel::null_density(double z) const {
  return normal_pdf(z, mu0_, sigma0_);
}

double DensityModel::alt_density(double z) const {
  double f = 0.0;
  for (const auto& c : components_) f += c.weight * normal_pdf(z, c.mean, c.sd);
  return f;
}

double DensityModel::f1_integral() const {
  if (f1_grid_.size() < 2) return 0.0;
  double s = 0.5 * (f1_grid_.front() + f1_grid_.back());
  for (std::size_t j = 1; j + 1 < f1_grid_.size(); ++j) s += f1_grid_[j];
  return s * step_;
}

DensityModel estimate_empirical_null(std::span<const double> z) {
  if (z.size() < 10) fail(ErrorKind::Data, "empirical null needs >= 10 values");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = quantile_sorted(sorted, normal_cdf(-1.0));
  const double hi = quantile_sorted(sorted, normal_cdf(1.0));
  double sum = 0.0, sumsq = 0.0;
  std::size_t count = 0;
  for (double v : sorted) {
    if (v < lo || v > hi) continue;
    sum += v;
    sumsq += v * v;
    ++count;
  }
  if (count < 2 || hi <= lo) {
    fail(ErrorKind::Data, "empirical null: central band is degenerate");
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sumsq / static_cast<double>(count) - mean * mean;
  // Variance of N(0,1) truncated to [-1, 1].
  const double trunc_mass = normal_cdf(1.0) - normal_cdf(-1.0);
  const double trunc_var = 1.0 - 2.0 * normal_pdf(1.0) / trunc_mass;
  return DensityModel::empirical_null(mean, std::sqrt(var / trunc_var));
}

DensityModel estimate_alt_density(std::span<const double> z,
                                  const DensityModel& model_in,
                                  const PredictiveRecursionOptions& opts) {
  if (z.empty()) fail(ErrorKind::InvalidArgument, "no observations");
  if (z.size() < 100) {
    fail(ErrorKind::Data, "alternative density estimation needs >= 100 values");
  }
  require(opts.sweeps >= 1, "predictive recursion needs at least one sweep");
  require(opts.grid_points >= 2, "predictive recursion grid too small");
  require(opts.initial_null_prob > 0.0 && opts.initial_null_prob < 1.0,
          "initial null probability must lie in (0,1)");

  const auto [zmin_it, zmax_it] = std::minmax_element(z.begin(), z.end());
  double tlo = *zmin_it, thi = *zmax_it;
  if (thi - tlo < 1e-8) {
    tlo -= 1.0;
    thi += 1.0;
  }
  const std::size_t g_count = opts.grid_points;
  const double h = (thi - tlo) / static_cast<double>(g_count - 1);
  const double s = model_in.sigma0();

  std::vector<double> f0(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) f0[i] = model_in.null_density(z[i]);

  double pi0 = opts.initial_null_prob;
  std::vector<double> mass(g_count, (1.0 - pi0) / static_cast<double>(g_count));
  std::vector<double> kernel(g_count);

  // Kernel N(z; theta_g, s) on the evenly spaced theta grid by the
  // multiplicative recurrence outward from the grid point nearest z.
  const double step_decay = std::exp(-h * h / (s * s));
  auto fill_kernel = [&](double zi) {
    const double pos = std::clamp((zi - tlo) / h, 0.0,
                                  static_cast<double>(g_count - 1));
    const auto g0 = static_cast<std::size_t>(std::lround(pos));
    const double d0 = zi - (tlo + h * static_cast<double>(g0));
    kernel[g0] = normal_pdf(d0, 0.0, s);
    double k = kernel[g0];
    double ratio = std::exp((2.0 * d0 * h - h * h) / (2.0 * s * s));
    for (std::size_t g = g0 + 1; g < g_count; ++g) {
      k = (k < 1e-300) ? 0.0 : k * ratio;
      kernel[g] = k;
      ratio *= step_decay;
    }
    k = kernel[g0];
    ratio = std::exp(-(2.0 * d0 * h + h * h) / (2.0 * s * s));
    for (std::size_t g = g0; g-- > 0;) {
      k = (k < 1e-300) ? 0.0 : k * ratio;
      kernel[g] = k;
      ratio *= step_decay;
    }
  };

  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (std::size_t sweep = 0; sweep < opts.sweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double c = std::pow(static_cast<double>(t + 1), -opts.decay);
      fill_kernel(z[i]);
      double m1 = 0.0;
      for (std::size_t g = 0; g < g_count; ++g) m1 += mass[g] * kernel[g];
      const double m0 = pi0 * f0[i];
      const double denom = m0 + m1;
      if (!(denom > 0.0)) continue;  // observation far outside every kernel
      const double scale = c / denom;
      for (std::size_t g = 0; g < g_count; ++g) {
        mass[g] = (1.0 - c) * mass[g] + scale * mass[g] * kernel[g];
      }
      pi0 = (1.0 - c) * pi0 + scale * m0;
    }
  }

  const double alt_mass = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(alt_mass > 0.0)) {
    fail(ErrorKind::Numerical, "predictive recursion: alternative has no mass");
  }
  std::vector<NormalComponent> comps;
  comps.reserve(g_count);
  const double floor = alt_mass * 1e-14;
  for (std::size_t g = 0; g < g_count; ++g) {
    if (mass[g] > floor) {
      comps.push_back({mass[g], tlo + h * static_cast<double>(g), s});
    }
  }
  DensityModel out = model_in.with_alternative(
      std::move(comps), *zmin_it - 5.0 * s - 1.0, *zmax_it + 5.0 * s + 1.0,
      opts.grid_points);
  out.set_alt_weight(alt_mass / (alt_mass + pi0));
  const double integral = out.f1_integral();
  if (integral < 0.9 || integral > 1.1) {
    fail(ErrorKind::Numerical, "estimated alternative density is not normalizable");
  }
  return out;
}

double estimate_null_proportion(std::span<const double> z, double mu0,
                                double sigma0) {
  if (z.empty()) fail(ErrorKind::InvalidArgument, "no observations");
  require(sigma0 > 0.0, "null sd must be positive");
  if (sample_sd(z) <= 0.0) {
    fail(ErrorKind::Data, "null proportion: input has zero variance");
  }
  const std::size_t n = z.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (z[i] - mu0) / sigma0;

  constexpr int kXiSteps = 100;
  double weight_sum = 0.0;
  for (int b = 0; b <= kXiSteps; ++b) weight_sum += 1.0 - b / double(kXiSteps);

  // t_n = sqrt(2 gamma log n) with gamma = 1/2.
  const double t_max = std::sqrt(std::log(static_cast<double>(n)));
  std::vector<double> mean_cos(kXiSteps + 1);
  double best = 0.0;
  for (int a = 1; 0.1 * a <= t_max + 1e-12; ++a) {
    const double t = 0.1 * a;
    std::fill(mean_cos.begin(), mean_cos.end(), 0.0);
    for (double ui : u) {
      // cos(b * phi) for b = 0..100 by the Chebyshev recurrence.
      const double phi = t * ui / kXiSteps;
      const double c1 = std::cos(phi);
      double prev = 1.0, cur = c1;
      mean_cos[0] += 1.0;
      mean_cos[1] += c1;
      for (int b = 2; b <= kXiSteps; ++b) {
        const double next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
        mean_cos[b] += cur;
      }
    }
    double acc = 0.0;
    for (int b = 0; b <= kXiSteps; ++b) {
      const double xi = b / double(kXiSteps);
      acc += (1.0 - xi) * std::exp(0.5 * t * t * xi * xi) * mean_cos[b] /
             static_cast<double>(n);
    }
    best = std::max(best, 1.0 - acc / weight_sum);
  }
  return std::clamp(1.0 - best, 0.0, 1.0);
}

KernelDensity::KernelDensity(std::span<const double> z, std::size_t bins) {
  if (z.size() < 2) fail(ErrorKind::Data, "kernel density needs >= 2 values");
  require(bins >= 16, "kernel density needs at least 16 bins");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(z.size());
  const double sd = sample_sd(z);
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) fail(ErrorKind::Data, "kernel density: zero spread");
  bandwidth_ = 0.9 * spread * std::pow(n, -0.2);

  lo_ = sorted.front() - 4.0 * bandwidth_;
  const double hi = sorted.back() + 4.0 * bandwidth_;
  step_ = (hi - lo_) / static_cast<double>(bins - 1);

  std::vector<double> counts(bins, 0.0);
  for (double v : z) {
    const double pos = (v - lo_) / step_;
    const auto j = std::min(static_cast<std::size_t>(pos), bins - 2);
    const double frac = pos - static_cast<double>(j);
    counts[j] += 1.0 - frac;
    counts[j + 1] += frac;
  }
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(5.0 * bandwidth_ / step_));
  std::vector<double> kern(static_cast<std::size_t>(2 * reach + 1));
  for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
    kern[static_cast<std::size_t>(k + reach)] =
        normal_pdf(static_cast<double>(k) * step_, 0.0, bandwidth_) / n;
  }
  density_.assign(bins, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(bins);
  for (std::ptrdiff_t j = 0; j < nb; ++j) {
    const double cj = counts[static_cast<std::size_t>(j)];
    if (cj == 0.0) continue;
    const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, j - reach);
    const std::ptrdiff_t b = std::min<std::ptrdiff_t>(nb - 1, j + reach);
    for (std::ptrdiff_t i = a; i <= b; ++i) {
      density_[static_cast<std::size_t>(i)] +=
          cj * kern[static_cast<std::size_t>(i - j + reach)];
    }
  }
}

double KernelDensity::operator()(double z) const {
  const double pos = (z - lo_) / step_;
  if (pos < 0.0 || pos > static_cast<double>(density_.size() - 1)) return 0.0;
  const auto j = std::min(static_cast<std::size_t>(pos), density_.size() - 2);
  const double frac = pos - static_cast<double>(j);
  return density_[j] * (1.0 - frac) + density_[j + 1] * frac;
}

}  // namespace smdr
