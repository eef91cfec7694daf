#pragma once

#include <vector>

#include "smdr/densities.hpp"
#include "smdr/fused_prior.hpp"
#include "smdr/posterior.hpp"

namespace smdr {

struct AnalysisOptions {
  std::vector<double> lambdas;  // empty: default_lambda_grid()
  NullKind null_kind = NullKind::Theoretical;
  FitOptions fit;
  PredictiveRecursionOptions density;
};

// Densities -> lambda path -> chosen prior -> posterior.
struct Analysis {
  DensityModel model;
  LambdaPath path;
  PosteriorField posterior;

  const PriorField& prior() const { return path.fits[path.best_index]; }
  double lambda() const { return path.lambda; }
};

Analysis analyze(const ZGrid& z, const AnalysisOptions& opts = {});

}  // namespace smdr
