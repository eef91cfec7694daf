#include "smdr/fused_lasso.hpp"

#include "smdr/errors.hpp"

namespace smdr {

template <class WeightAt>
void FusedLassoSolver::run(std::span<const double> y, WeightAt w,
                           double lambda, std::span<double> out) {
  const std::size_t n = y.size();
  if (n == 0) return;
  if (n == 1 || lambda == 0.0) {
    std::copy(y.begin(), y.end(), out.begin());
    return;
  }
  x_.resize(2 * n);
  a_.resize(2 * n);
  b_.resize(2 * n);
  tm_.resize(n - 1);
  tp_.resize(n - 1);

  // Knots of the message derivative live in x_[l..r]; a_/b_ hold the
  // slope/intercept increments at each knot.
  tm_[0] = -lambda / w(0) + y[0];
  tp_[0] = lambda / w(0) + y[0];
  std::size_t l = n - 1;
  std::size_t r = n;
  x_[l] = tm_[0];
  x_[r] = tp_[0];
  a_[l] = w(0);
  b_[l] = -w(0) * y[0] + lambda;
  a_[r] = -w(0);
  b_[r] = w(0) * y[0] + lambda;
  double afirst = w(1);
  double bfirst = -lambda - w(1) * y[1];
  double alast = -w(1);
  double blast = w(1) * y[1] - lambda;

  for (std::size_t k = 1; k + 1 < n; ++k) {
    double alo = afirst;
    double blo = bfirst;
    std::size_t lo = l;
    for (; lo <= r; ++lo) {
      if (alo * x_[lo] + blo > -lambda) break;
      alo += a_[lo];
      blo += b_[lo];
    }

    double ahi = alast;
    double bhi = blast;
    std::size_t hi = r;
    for (; hi + 1 > lo; --hi) {  // hi >= lo without unsigned wrap
      if (-ahi * x_[hi] - bhi < lambda) break;
      ahi += a_[hi];
      bhi += b_[hi];
    }

    tm_[k] = (-lambda - blo) / alo;
    l = lo - 1;
    x_[l] = tm_[k];

    tp_[k] = (lambda + bhi) / (-ahi);
    r = hi + 1;
    x_[r] = tp_[k];

    a_[l] = alo;
    b_[l] = blo + lambda;
    a_[r] = ahi;
    b_[r] = bhi + lambda;
    afirst = w(k + 1);
    bfirst = -lambda - w(k + 1) * y[k + 1];
    alast = -w(k + 1);
    blast = w(k + 1) * y[k + 1] - lambda;
  }

  double alo = afirst;
  double blo = bfirst;
  for (std::size_t lo = l; lo <= r; ++lo) {
    if (alo * x_[lo] + blo > 0.0) break;
    alo += a_[lo];
    blo += b_[lo];
  }
  out[n - 1] = -blo / alo;

  for (std::size_t k = n - 1; k-- > 0;) {
    if (out[k + 1] > tp_[k]) {
      out[k] = tp_[k];
    } else if (out[k + 1] < tm_[k]) {
      out[k] = tm_[k];
    } else {
      out[k] = out[k + 1];
    }
  }
}

void FusedLassoSolver::solve(std::span<const double> y,
                             std::span<const double> weights, double lambda,
                             std::span<double> out) {
  require(weights.size() == y.size() && out.size() == y.size(),
          "fused_lasso_1d: length mismatch");
  require(lambda >= 0.0, "fused_lasso_1d: lambda must be nonnegative");
  for (double w : weights) {
    require(w > 0.0, "fused_lasso_1d: weights must be positive");
  }
  run(y, [&](std::size_t i) { return weights[i]; }, lambda, out);
}

void FusedLassoSolver::solve_unit(std::span<const double> y, double lambda,
                                  std::span<double> out) {
  run(y, [](std::size_t) { return 1.0; }, lambda, out);
}

std::vector<double> fused_lasso_1d(std::span<const double> y,
                                   std::span<const double> weights,
                                   double lambda) {
  require(!y.empty(), "fused_lasso_1d: empty input");
  std::vector<double> out(y.size());
  FusedLassoSolver solver;
  solver.solve(y, weights, lambda, out);
  return out;
}

}  // namespace smdr
