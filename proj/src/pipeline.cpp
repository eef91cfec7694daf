#include "smdr/pipeline.hpp"

#include <algorithm>

#include "smdr/errors.hpp"

namespace smdr {

Analysis analyze(const ZGrid& z, const AnalysisOptions& opts) {
  if (z.size() == 0) fail(ErrorKind::Data, "empty z-grid");
  const GridGraph graph(z.width, z.height);
  Analysis out;
  const DensityModel null_model = opts.null_kind == NullKind::Empirical
                                      ? estimate_empirical_null(z.values)
                                      : DensityModel::theoretical_null();
  out.model = estimate_alt_density(z.values, null_model, opts.density);
  const NodeLikelihood lik = NodeLikelihood::evaluate(z, out.model);
  const std::vector<double> grid =
      opts.lambdas.empty() ? default_lambda_grid() : opts.lambdas;
  out.path = select_lambda(lik, graph, grid, opts.fit,
                           std::clamp(out.model.alt_weight(), 1e-4, 0.5));
  // Only the chosen fit's solver state is worth keeping.
  for (std::size_t k = 0; k < out.path.fits.size(); ++k) {
    if (k != out.path.best_index) out.path.fits[k].solver_state.reset();
  }
  out.posterior = compute_posterior(out.prior().c, lik);
  return out;
}

}  // namespace smdr
