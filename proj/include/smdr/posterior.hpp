#pragma once

#include <span>
#include <vector>

#include "smdr/fused_prior.hpp"

namespace smdr {

struct PosteriorField {
  std::vector<double> w;
  double s_hat = 0.0;
  // Node indices by decreasing w; ties by ascending index.
  std::vector<NodeIndex> order;

  static PosteriorField from_weights(std::vector<double> w);
};

// w_i = c_i f1 / (c_i f1 + (1 - c_i) f0) from per-node priors and densities.
PosteriorField compute_posterior(std::span<const double> prior,
                                 const NodeLikelihood& lik);
PosteriorField compute_posterior(const ZGrid& z, const PriorField& prior,
                                 const DensityModel& model);

double estimate_signal_count(const PosteriorField& post);

}  // namespace smdr
