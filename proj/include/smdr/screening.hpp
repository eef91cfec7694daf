#pragma once

#include <span>
#include <string>
#include <vector>

#include "smdr/posterior.hpp"

namespace smdr {

struct Selection {
  std::vector<bool> mask;
  std::size_t j_star = 0;
  double level = 0.0;  // beta for false-negative control, alpha for FDR
  // Entry j: BMDR of retaining the top-j nodes (j = 0..n). Empty for
  // procedures that do not produce one.
  std::vector<double> bmdr_trace;
  std::string method_tag;
};

// Posterior mean false negatives over posterior mean signal count.
double bmdr(const PosteriorField& post, const std::vector<bool>& mask);

// BMDR of every prefix of `order`; trace[j] uses `denominator`.
std::vector<double> prefix_bmdr_trace(const PosteriorField& post, double denominator);

// Smallest prefix j with trace[j] < level.
Selection screen_prefix(const PosteriorField& post, std::vector<double> trace,
                        double level, std::string tag);

Selection screen_smdr(const PosteriorField& post, double beta);

// The same rule with w computed from the true c, f0 and f1.
Selection oracle_screen(std::span<const double> true_c, const DensityModel& true_model,
                        const ZGrid& z, double beta);

}  // namespace smdr
