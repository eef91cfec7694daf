#include "smdr/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smdr/errors.hpp"

namespace smdr {

PosteriorField PosteriorField::from_weights(std::vector<double> w) {
  PosteriorField post;
  for (double v : w) {
    require(v >= 0.0 && v <= 1.0, "posterior weights must lie in [0,1]");
  }
  post.w = std::move(w);
  post.s_hat = std::accumulate(post.w.begin(), post.w.end(), 0.0);
  post.order.resize(post.w.size());
  std::iota(post.order.begin(), post.order.end(), NodeIndex{0});
  std::stable_sort(post.order.begin(), post.order.end(),
                   [&](NodeIndex a, NodeIndex b) { return post.w[a] > post.w[b]; });
  return post;
}

PosteriorField compute_posterior(std::span<const double> prior,
                                 const NodeLikelihood& lik) {
  require(prior.size() == lik.size(), "prior and densities differ in length");
  std::vector<double> w(prior.size());
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double c = prior[i];
    require(c >= 0.0 && c <= 1.0, "prior probabilities must lie in [0,1]");
    const double num = c * lik.f1[i];
    const double den = num + (1.0 - c) * lik.f0[i];
    if (!(den > 0.0) || !std::isfinite(den)) {
      fail(ErrorKind::Numerical,
           "both densities vanish at node " + std::to_string(i));
    }
    w[i] = std::clamp(num / den, 0.0, 1.0);
  }
  return PosteriorField::from_weights(std::move(w));
}

PosteriorField compute_posterior(const ZGrid& z, const PriorField& prior,
                                 const DensityModel& model) {
  require(prior.c.size() == z.size(), "prior size does not match grid");
  return compute_posterior(prior.c, NodeLikelihood::evaluate(z, model));
}

double estimate_signal_count(const PosteriorField& post) { return post.s_hat; }

}  // namespace smdr
