#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "smdr/densities.hpp"
#include "smdr/grid_graph.hpp"
#include "smdr/zgrid.hpp"

namespace smdr {

inline constexpr double kGammaClamp = 8.0;

// Per-node null/alternative density values at the observed statistics.
struct NodeLikelihood {
  std::vector<double> f0;
  std::vector<double> f1;

  static NodeLikelihood evaluate(const ZGrid& z, const DensityModel& model);
  std::size_t size() const noexcept { return f0.size(); }
};

// ADMM state carried between fits on the same graph (warm starts).
struct AdmmState {
  std::vector<double> z;  // per-trail copies, trails concatenated
  std::vector<double> u;  // scaled duals for the copies
  double rho = 1.0;
};

struct PriorField {
  std::vector<double> gamma;
  std::vector<double> c;
  double lambda = 0.0;
  double objective = 0.0;
  double likelihood = 0.0;  // l(gamma) alone, without the penalty
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t plateau_count = 0;
  // Objective after each accepted outer iteration, starting with the initial
  // point. Non-increasing by construction.
  std::vector<double> objective_trace;
  std::shared_ptr<const AdmmState> solver_state;
};

double logistic(double gamma);

// l(gamma) + lambda * sum_{(i,j) in E} |gamma_i - gamma_j|.
double objective(std::span<const double> gamma, const NodeLikelihood& lik,
                 double lambda, const GridGraph& graph);
double objective(std::span<const double> gamma, const ZGrid& z,
                 const DensityModel& model, double lambda,
                 const GridGraph& graph);
double negative_log_likelihood(std::span<const double> gamma,
                               const NodeLikelihood& lik);

// Connected components of the graph after joining neighbours whose gammas
// agree to within `tol`.
std::size_t count_plateaus(std::span<const double> gamma, const GridGraph& graph,
                           double tol = 1e-3);

struct FitOptions {
  double tol = 1e-7;
  std::size_t max_iter = 500;
  std::size_t admm_max_iter = 200;
  double admm_eps = 1e-5;  // residual bound is admm_eps * sqrt(n)
  double rho = 1.0;
};

// EM over the logistic prior: the E-step forms node responsibilities, the
// M-step solves the convex logistic graph-fused-lasso surrogate by ADMM over
// the row/column trails. `warm` (optional) supplies the starting gamma and
// ADMM state.
PriorField fit_prior(const NodeLikelihood& lik, const GridGraph& graph,
                     double lambda, const FitOptions& opts = {},
                     const PriorField* warm = nullptr,
                     double initial_prior = 0.1);
PriorField fit_prior(const ZGrid& z, const GridGraph& graph,
                     const DensityModel& model, double lambda, double tol,
                     std::size_t max_iter);

std::vector<double> default_lambda_grid();

struct LambdaPath {
  double lambda = 0.0;
  std::size_t best_index = 0;
  std::vector<double> grid;
  std::vector<double> bic;
  std::vector<PriorField> fits;  // aligned with grid
};

// Fits the path from the largest lambda down with warm starts and picks the
// minimizer of 2 l(gamma) + log(n) * plateaus, ties toward larger lambda.
LambdaPath select_lambda(const NodeLikelihood& lik, const GridGraph& graph,
                         std::span<const double> grid,
                         const FitOptions& opts = {},
                         double initial_prior = 0.1);
LambdaPath select_lambda(const ZGrid& z, const GridGraph& graph,
                         const DensityModel& model,
                         std::span<const double> grid);

}  // namespace smdr
