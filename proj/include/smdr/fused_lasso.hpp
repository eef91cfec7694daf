#pragma once

#include <span>
#include <vector>

namespace smdr {

// Exact minimizer of  sum_t w_t (y_t - x_t)^2 / 2 + lambda * sum_t |x_{t+1} - x_t|
// by the linear-time dynamic program over piecewise-linear message
// derivatives. Weights must be strictly positive.
std::vector<double> fused_lasso_1d(std::span<const double> y,
                                   std::span<const double> weights,
                                   double lambda);

// Unit-weight variant writing into `out` (same length as y); reuses the
// caller's scratch buffer. Used on every trail of every ADMM sweep.
class FusedLassoSolver {
 public:
  void solve(std::span<const double> y, std::span<const double> weights,
             double lambda, std::span<double> out);
  void solve_unit(std::span<const double> y, double lambda,
                  std::span<double> out);

 private:
  template <class WeightAt>
  void run(std::span<const double> y, WeightAt w, double lambda,
           std::span<double> out);

  std::vector<double> x_, a_, b_, tm_, tp_;
};

}  // namespace smdr
