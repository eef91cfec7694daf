#pragma once

// Reference implementations used only by the tests. Each one is written
// for clarity, not speed, and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

inline double fused_objective(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& w, double lambda) {
  double f = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) f += 0.5 * w[t] * (y[t] - x[t]) * (y[t] - x[t]);
  for (std::size_t t = 0; t + 1 < y.size(); ++t) f += lambda * std::abs(x[t + 1] - x[t]);
  return f;
}

// Enumerates every pattern of {down, fused, up} between neighbours. For a
// fixed pattern each fused segment has the closed-form stationary value
//   (sum w y + lambda (s_right - s_left)) / sum w,
// where s_left / s_right are the signs of the jumps entering and leaving
// the segment. The optimum is one of these candidates.
inline std::vector<double> fused_lasso_brute(const std::vector<double>& y,
                                             const std::vector<double>& w, double lambda) {
  const std::size_t n = y.size();
  std::size_t patterns = 1;
  for (std::size_t k = 1; k < n; ++k) patterns *= 3;
  std::vector<double> best;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<int> sign(n > 0 ? n - 1 : 0);
  std::vector<double> x(n);
  for (std::size_t code = 0; code < patterns; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      sign[k] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    std::size_t start = 0;
    while (start < n) {
      std::size_t end = start;
      while (end + 1 < n && sign[end] == 0) ++end;
      double sw = 0.0, swy = 0.0;
      for (std::size_t t = start; t <= end; ++t) {
        sw += w[t];
        swy += w[t] * y[t];
      }
      const double s_left = start > 0 ? sign[start - 1] : 0.0;
      const double s_right = end + 1 < n ? sign[end] : 0.0;
      const double v = (swy + lambda * (s_right - s_left)) / sw;
      for (std::size_t t = start; t <= end; ++t) x[t] = v;
      start = end + 1;
    }
    const double f = fused_objective(x, y, w, lambda);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

inline double normal_pdf(double z, double mean = 0.0, double sd = 1.0) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double u = (static_cast<long double>(z) - mean) / sd;
  return static_cast<double>(std::exp(-0.5L * u * u) / (sd * std::sqrt(2.0L * pi)));
}

// Step-up BH by direct search over k.
inline std::vector<bool> bh(const std::vector<double>& p, double alpha) {
  const std::size_t n = p.size();
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  std::size_t k = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (sorted[i - 1] <= alpha * static_cast<double>(i) / static_cast<double>(n)) k = i;
  }
  std::vector<bool> mask(n, false);
  if (k == 0) return mask;
  const double cut = sorted[k - 1];
  for (std::size_t i = 0; i < n; ++i) mask[i] = p[i] <= cut;
  return mask;
}

// BMDR of a mask, summed directly.
inline double bmdr(const std::vector<double>& w, const std::vector<bool>& mask) {
  double missed = 0.0, total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += w[i];
    if (!mask[i]) missed += w[i];
  }
  return missed / total;
}

}  // namespace oracle
