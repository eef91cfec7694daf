#include "smdr/screening.hpp"

#include "smdr/errors.hpp"

namespace smdr {

namespace {

void require_level(double level) {
  require(level > 0.0 && level < 1.0, "control level must lie in (0,1)");
}

void require_signal_mass(double s_hat) {
  if (!(s_hat > 0.0)) {
    fail(ErrorKind::Numerical,
         "degenerate posterior: estimated signal count is zero; check that the "
         "input holds z-statistics or switch to the empirical null");
  }
}

}  // namespace

double bmdr(const PosteriorField& post, const std::vector<bool>& mask) {
  require(mask.size() == post.w.size(), "mask size does not match posterior");
  require_signal_mass(post.s_hat);
  double missed = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) missed += post.w[i];
  }
  return missed / post.s_hat;
}

std::vector<double> prefix_bmdr_trace(const PosteriorField& post, double denominator) {
  require_signal_mass(denominator);
  const std::size_t n = post.order.size();
  // Suffix sums accumulated from the tail are monotone in floating point.
  std::vector<double> trace(n + 1);
  double tail = 0.0;
  trace[n] = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    tail += post.w[post.order[j]];
    trace[j] = tail / denominator;
  }
  return trace;
}

Selection screen_prefix(const PosteriorField& post, std::vector<double> trace,
                        double level, std::string tag) {
  require_level(level);
  const std::size_t n = post.order.size();
  require(trace.size() == n + 1, "trace length must be node count + 1");
  std::size_t j = 0;
  while (j <= n && !(trace[j] < level)) ++j;
  if (j > n) {
    fail(ErrorKind::Numerical,
         "degenerate posterior: no prefix reaches the requested level");
  }
  Selection sel;
  sel.mask.assign(n, false);
  for (std::size_t k = 0; k < j; ++k) sel.mask[post.order[k]] = true;
  sel.j_star = j;
  sel.level = level;
  sel.bmdr_trace = std::move(trace);
  sel.method_tag = std::move(tag);
  return sel;
}

Selection screen_smdr(const PosteriorField& post, double beta) {
  require_level(beta);
  return screen_prefix(post, prefix_bmdr_trace(post, post.s_hat), beta, "smdr");
}

Selection oracle_screen(std::span<const double> true_c, const DensityModel& true_model,
                        const ZGrid& z, double beta) {
  const PosteriorField post =
      compute_posterior(true_c, NodeLikelihood::evaluate(z, true_model));
  Selection sel = screen_smdr(post, beta);
  sel.method_tag = "oracle";
  return sel;
}

}  // namespace smdr
