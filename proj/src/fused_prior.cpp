#include "smdr/fused_prior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "smdr/errors.hpp"
#include "smdr/fused_lasso.hpp"

namespace smdr {

namespace {
double clamp_gamma(double g) { return std::clamp(g, -kGammaClamp, kGammaClamp); }

double logit_clamped(double p) {
  if (p <= 0.0) return -kGammaClamp;
  if (p >= 1.0) return kGammaClamp;
  return clamp_gamma(std::log(p / (1.0 - p)));
}

void check_likelihood(const NodeLikelihood& lik) {
  require(lik.f0.size() == lik.f1.size(), "likelihood arrays differ in length");
  for (std::size_t i = 0; i < lik.size(); ++i) {
    const double a = lik.f0[i], b = lik.f1[i];
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
        a + b <= 0.0) {
      fail(ErrorKind::Numerical,
           "both densities vanish (or are invalid) at node " + std::to_string(i));
    }
  }
}

// Flattened trail copies: copy k belongs to node node_of[k]; every node has
// at most two copies (its row and its column).
struct TrailLayout {
  std::vector<std::size_t> offsets;  // trail t spans [offsets[t], offsets[t+1])
  std::vector<NodeIndex> node_of;
  std::vector<std::array<std::size_t, 2>> copies;
  std::vector<unsigned> degree;

  explicit TrailLayout(const GridGraph& g) {
    const std::size_t n = g.node_count();
    copies.assign(n, {0, 0});
    degree.assign(n, 0);
    offsets.push_back(0);
    for (const auto& trail : g.trails()) {
      for (NodeIndex v : trail) {
        copies[v][degree[v]++] = node_of.size();
        node_of.push_back(v);
      }
      offsets.push_back(node_of.size());
    }
  }
  std::size_t copy_count() const { return node_of.size(); }
};

// Minimizes sigma(x) - q x ... i.e. -q x + log(1 + e^x) + (rd/2)(x - v)^2 on
// [-8, 8] by Newton steps safeguarded with a bisection bracket.
double solve_node(double q, double rd, double v, double x) {
  const double lo_grad = logistic(-kGammaClamp) - q + rd * (-kGammaClamp - v);
  if (lo_grad >= 0.0) return -kGammaClamp;
  const double hi_grad = logistic(kGammaClamp) - q + rd * (kGammaClamp - v);
  if (hi_grad <= 0.0) return kGammaClamp;
  double lo = -kGammaClamp, hi = kGammaClamp;
  x = std::clamp(x, lo, hi);
  for (int it = 0; it < 50; ++it) {
    const double s = logistic(x);
    const double g = s - q + rd * (x - v);
    if (g > 0.0) hi = x; else lo = x;
    const double h = s * (1.0 - s) + rd;
    double next = x - g / h;
    if (std::abs(next - x) < 1e-10) return std::clamp(next, lo, hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

constexpr std::size_t kMaxResumes = 20;

class AdmmSolver {
 public:
  AdmmSolver(const GridGraph& graph, const FitOptions& opts)
      : graph_(graph), layout_(graph), opts_(opts) {}

  const TrailLayout& layout() const { return layout_; }

  // One M-step: returns the (approximate) minimizer of
  //   sum_i [-q_i x_i + log(1 + e^{x_i})] + lambda * TV(x)
  // starting from x and the given state.
  void minimize(std::span<const double> q, double lambda, std::vector<double>& x,
                AdmmState& st) {
    const std::size_t n = graph_.node_count();
    const std::size_t m = layout_.copy_count();
    const double bound = opts_.admm_eps * std::sqrt(static_cast<double>(n));
    std::vector<double> y;
    std::vector<double> znew;
    for (std::size_t it = 0; it < opts_.admm_max_iter; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        const unsigned d = layout_.degree[i];
        if (d == 0) {
          x[i] = logit_clamped(q[i]);
          continue;
        }
        double v = 0.0;
        for (unsigned k = 0; k < d; ++k) {
          const std::size_t c = layout_.copies[i][k];
          v += st.z[c] - st.u[c];
        }
        v /= d;
        x[i] = solve_node(q[i], st.rho * d, v, x[i]);
      }

      double dual_sq = 0.0;
      double primal_sq = 0.0;
      const double thr = lambda / st.rho;
      for (std::size_t t = 0; t + 1 < layout_.offsets.size(); ++t) {
        const std::size_t a = layout_.offsets[t];
        const std::size_t len = layout_.offsets[t + 1] - a;
        y.resize(len);
        znew.resize(len);
        for (std::size_t k = 0; k < len; ++k) {
          y[k] = x[layout_.node_of[a + k]] + st.u[a + k];
        }
        dp_.solve_unit(y, thr, znew);
        for (std::size_t k = 0; k < len; ++k) {
          const double diff = znew[k] - st.z[a + k];
          dual_sq += diff * diff;
          st.z[a + k] = znew[k];
        }
      }
      for (std::size_t c = 0; c < m; ++c) {
        const double r = x[layout_.node_of[c]] - st.z[c];
        st.u[c] += r;
        primal_sq += r * r;
      }
      const double primal = std::sqrt(primal_sq);
      const double dual = st.rho * std::sqrt(dual_sq);
      if (primal < bound && dual < bound) break;
      if (it % 5 == 4) {
        if (primal > 10.0 * dual) {
          st.rho *= 2.0;
          for (double& u : st.u) u *= 0.5;
        } else if (dual > 10.0 * primal) {
          st.rho *= 0.5;
          for (double& u : st.u) u *= 2.0;
        }
      }
    }
  }

 private:
  const GridGraph& graph_;
  TrailLayout layout_;
  FitOptions opts_;
  FusedLassoSolver dp_;
};

}  // namespace

double logistic(double gamma) {
  if (gamma >= 0.0) return 1.0 / (1.0 + std::exp(-gamma));
  const double e = std::exp(gamma);
  return e / (1.0 + e);
}

NodeLikelihood NodeLikelihood::evaluate(const ZGrid& z, const DensityModel& model) {
  require(model.has_alternative(), "density model has no alternative density");
  NodeLikelihood lik;
  lik.f0.resize(z.size());
  lik.f1.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    lik.f0[i] = model.null_density(z.values[i]);
    lik.f1[i] = model.alt_density(z.values[i]);
  }
  return lik;
}

double negative_log_likelihood(std::span<const double> gamma,
                               const NodeLikelihood& lik) {
  require(gamma.size() == lik.size(), "gamma length does not match node count");
  double total = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double c = logistic(gamma[i]);
    const double mix = c * lik.f1[i] + (1.0 - c) * lik.f0[i];
    if (!(mix > 0.0) || !std::isfinite(mix)) {
      fail(ErrorKind::Numerical,
           "mixture density vanishes at node " + std::to_string(i));
    }
    total -= std::log(mix);
  }
  return total;
}

double objective(std::span<const double> gamma, const NodeLikelihood& lik,
                 double lambda, const GridGraph& graph) {
  require(gamma.size() == graph.node_count(),
          "gamma length does not match node count");
  require(lambda >= 0.0, "lambda must be nonnegative");
  double penalty = 0.0;
  for (const auto& [i, j] : graph.edges()) penalty += std::abs(gamma[i] - gamma[j]);
  const double value = negative_log_likelihood(gamma, lik) + lambda * penalty;
  if (!std::isfinite(value)) fail(ErrorKind::Numerical, "objective is not finite");
  return value;
}

double objective(std::span<const double> gamma, const ZGrid& z,
                 const DensityModel& model, double lambda, const GridGraph& graph) {
  return objective(gamma, NodeLikelihood::evaluate(z, model), lambda, graph);
}

std::size_t count_plateaus(std::span<const double> gamma, const GridGraph& graph,
                           double tol) {
  std::vector<std::size_t> parent(gamma.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::size_t components = gamma.size();
  for (const auto& [i, j] : graph.edges()) {
    if (std::abs(gamma[i] - gamma[j]) > tol) continue;
    const std::size_t a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

PriorField fit_prior(const NodeLikelihood& lik, const GridGraph& graph,
                     double lambda, const FitOptions& opts,
                     const PriorField* warm, double initial_prior) {
  const std::size_t n = graph.node_count();
  require(lik.size() == n, "likelihood size does not match graph");
  require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be nonnegative");
  require(opts.tol > 0.0, "tol must be positive");
  check_likelihood(lik);

  AdmmSolver admm(graph, opts);
  const std::size_t m = admm.layout().copy_count();

  std::vector<double> gamma;
  if (warm != nullptr && warm->gamma.size() == n) {
    gamma = warm->gamma;
  } else {
    gamma.assign(n, logit_clamped(std::clamp(initial_prior, 1e-6, 1.0 - 1e-6)));
  }
  AdmmState state;
  if (warm != nullptr && warm->solver_state && warm->solver_state->z.size() == m) {
    state = *warm->solver_state;
  } else {
    state.rho = opts.rho;
    state.z.resize(m);
    state.u.assign(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) state.z[c] = gamma[admm.layout().node_of[c]];
  }

  PriorField out;
  out.lambda = lambda;
  double current = objective(gamma, lik, lambda, graph);
  out.objective_trace.push_back(current);

  std::vector<double> q(n), proposal(n), candidate(n);
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double c = logistic(gamma[i]);
      const double num = c * lik.f1[i];
      q[i] = num / (num + (1.0 - c) * lik.f0[i]);
    }
    proposal = gamma;
    if (lambda == 0.0) {
      for (std::size_t i = 0; i < n; ++i) proposal[i] = logit_clamped(q[i]);
    } else {
      admm.minimize(q, lambda, proposal, state);
    }
    double next = objective(proposal, lik, lambda, graph);
    // An inexact M-step that fails to descend is resumed from its own state.
    for (std::size_t retry = 0; retry < kMaxResumes && !(next <= current) && lambda > 0.0;
         ++retry) {
      admm.minimize(q, lambda, proposal, state);
      next = objective(proposal, lik, lambda, graph);
    }
    if (!(next <= current)) {
      out.converged = next - current <= opts.tol * std::max(1.0, std::abs(current));
      break;
    }
    // Step-doubling extrapolation along the EM direction, kept only while
    // it keeps lowering the objective.
    double best_step = 1.0;
    for (double step = 2.0; step <= 64.0; step *= 2.0) {
      for (std::size_t i = 0; i < n; ++i) {
        candidate[i] = clamp_gamma(gamma[i] + step * (proposal[i] - gamma[i]));
      }
      const double value = objective(candidate, lik, lambda, graph);
      if (!(value < next)) break;
      next = value;
      best_step = step;
    }
    if (best_step > 1.0) {
      for (std::size_t i = 0; i < n; ++i) {
        proposal[i] = clamp_gamma(gamma[i] + best_step * (proposal[i] - gamma[i]));
      }
    }
    const double rel = (current - next) / std::max(1.0, std::abs(current));
    gamma = proposal;
    current = next;
    out.objective_trace.push_back(current);
    out.iterations = iter;
    if (rel < opts.tol) {
      out.converged = true;
      break;
    }
  }

  out.gamma = std::move(gamma);
  out.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.c[i] = logistic(out.gamma[i]);
  out.objective = current;
  out.likelihood = negative_log_likelihood(out.gamma, lik);
  out.plateau_count = count_plateaus(out.gamma, graph);
  out.solver_state = std::make_shared<const AdmmState>(std::move(state));
  return out;
}

PriorField fit_prior(const ZGrid& z, const GridGraph& graph,
                     const DensityModel& model, double lambda, double tol,
                     std::size_t max_iter) {
  require(z.width == graph.width() && z.height == graph.height(),
          "grid and graph dimensions differ");
  FitOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return fit_prior(NodeLikelihood::evaluate(z, model), graph, lambda, opts,
                   nullptr, std::clamp(model.alt_weight(), 1e-4, 0.5));
}

std::vector<double> default_lambda_grid() {
  constexpr std::size_t kCount = 20;
  const double lo = std::log(0.05), hi = std::log(20.0);
  std::vector<double> grid(kCount);
  for (std::size_t k = 0; k < kCount; ++k) {
    grid[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) /
                                static_cast<double>(kCount - 1));
  }
  return grid;
}

LambdaPath select_lambda(const NodeLikelihood& lik, const GridGraph& graph,
                         std::span<const double> grid, const FitOptions& opts,
                         double initial_prior) {
  require(!grid.empty(), "lambda grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require(grid[k] > 0.0, "lambda grid values must be positive");
    require(k == 0 || grid[k] > grid[k - 1], "lambda grid must be strictly increasing");
  }
  LambdaPath path;
  path.grid.assign(grid.begin(), grid.end());
  path.fits.resize(grid.size());
  path.bic.resize(grid.size());
  const double log_n = std::log(static_cast<double>(graph.node_count()));
  const PriorField* warm = nullptr;
  double best = 0.0;
  for (std::size_t k = grid.size(); k-- > 0;) {
    path.fits[k] = fit_prior(lik, graph, grid[k], opts, warm, initial_prior);
    warm = &path.fits[k];
    path.bic[k] = 2.0 * path.fits[k].likelihood +
                  log_n * static_cast<double>(path.fits[k].plateau_count);
    if (k + 1 == grid.size() || path.bic[k] < best) {
      best = path.bic[k];
      path.best_index = k;
    }
  }
  path.lambda = grid[path.best_index];
  return path;
}

LambdaPath select_lambda(const ZGrid& z, const GridGraph& graph,
                         const DensityModel& model, std::span<const double> grid) {
  return select_lambda(NodeLikelihood::evaluate(z, model), graph, grid, {},
                       std::clamp(model.alt_weight(), 1e-4, 0.5));
}

}  // namespace smdr
