#pragma once

#include <vector>

#include "smdr/screening.hpp"
#include "smdr/zgrid.hpp"

namespace smdr {

struct PValueField {
  std::vector<double> p;

  // Two-sided normal p-values 2 (1 - Phi(|z|)).
  static PValueField from_z(const ZGrid& z);
};

// Benjamini-Hochberg step-up.
Selection bh_fdr(const PValueField& p, double alpha);

// Bayesian FDR step-up on local fdr 1 - w: the largest prefix (by ascending
// lfdr) whose mean lfdr is <= alpha. alpha may be 0.
Selection fdr_smoothing_select(const PosteriorField& post, double alpha);

struct IndependentMdr {
  Selection selection;
  double null_proportion = 1.0;
  double s_hat = 0.0;  // n * (1 - null_proportion)
  PosteriorField posterior;
};

// Constant-prior two-groups analogue of screen_smdr: JC null proportion,
// kernel marginal density, lfdr-based posteriors, and the prefix rule with
// the JC signal count as the denominator.
IndependentMdr mdr_independent_detailed(const ZGrid& z, double beta);
Selection mdr_independent(const ZGrid& z, double beta);

}  // namespace smdr
