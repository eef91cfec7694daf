#include "smdr/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "smdr/densities.hpp"
#include "smdr/errors.hpp"

namespace smdr {

PValueField PValueField::from_z(const ZGrid& z) {
  PValueField f;
  f.p.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) f.p[i] = two_sided_p(z.values[i]);
  return f;
}

Selection bh_fdr(const PValueField& pv, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  const std::size_t n = pv.p.size();
  for (double v : pv.p) require(v >= 0.0 && v <= 1.0, "p-values must lie in [0,1]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pv.p[a] < pv.p[b]; });
  std::size_t k = 0;
  for (std::size_t i = n; i > 0; --i) {
    if (pv.p[order[i - 1]] <= static_cast<double>(i) * alpha / static_cast<double>(n)) {
      k = i;
      break;
    }
  }
  Selection sel;
  sel.mask.assign(n, false);
  for (std::size_t i = 0; i < k; ++i) sel.mask[order[i]] = true;
  sel.j_star = k;
  sel.level = alpha;
  sel.method_tag = "bh";
  return sel;
}

Selection fdr_smoothing_select(const PosteriorField& post, double alpha) {
  require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
  const std::size_t n = post.order.size();
  // Running means of sorted lfdr are non-decreasing, so the largest valid
  // prefix is the last one that passes.
  std::size_t k = 0;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sum += 1.0 - post.w[post.order[j]];
    if (sum / static_cast<double>(j + 1) <= alpha) {
      k = j + 1;
    } else {
      break;
    }
  }
  Selection sel;
  sel.mask.assign(n, false);
  for (std::size_t j = 0; j < k; ++j) sel.mask[post.order[j]] = true;
  sel.j_star = k;
  sel.level = alpha;
  sel.method_tag = "fdrs";
  return sel;
}

IndependentMdr mdr_independent_detailed(const ZGrid& z, double beta) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  IndependentMdr out;
  out.null_proportion = estimate_null_proportion(z.values);
  const double n = static_cast<double>(z.size());
  out.s_hat = n * (1.0 - out.null_proportion);
  if (!(out.s_hat > 0.0)) {
    fail(ErrorKind::Numerical,
         "independent MDR: estimated signal count is zero (no signals to protect)");
  }
  const KernelDensity marginal(z.values);
  std::vector<double> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = marginal(z.values[i]);
    const double null_part = out.null_proportion * normal_pdf(z.values[i]);
    const double lfdr = f > 0.0 ? std::min(1.0, null_part / f) : 1.0;
    w[i] = 1.0 - lfdr;
  }
  out.posterior = PosteriorField::from_weights(std::move(w));
  out.selection =
      screen_prefix(out.posterior, prefix_bmdr_trace(out.posterior, out.s_hat),
                    beta, "mdr");
  return out;
}

Selection mdr_independent(const ZGrid& z, double beta) {
  return mdr_independent_detailed(z, beta).selection;
}

}  // namespace smdr
