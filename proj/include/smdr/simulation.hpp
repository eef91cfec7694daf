#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smdr/densities.hpp"
#include "smdr/pipeline.hpp"
#include "smdr/screening.hpp"
#include "smdr/zgrid.hpp"

namespace smdr {

enum class ThetaLaw { WellSeparated, PoorlySeparated };

struct Circle {
  int cx;
  int cy;
  int radius;
};

struct SimScenario {
  std::string tag;
  std::size_t width = 128;
  std::size_t height = 128;
  Circle first{52, 56, 15};
  Circle second{70, 66, 20};
  ThetaLaw theta_law = ThetaLaw::WellSeparated;
  double background_c = 0.0;
  std::size_t replications = 20;
  std::uint64_t seed = 20240101;

  void validate() const;
  // The alternative density of z implied by theta_law (theta + N(0,1)).
  DensityModel true_model() const;
};

// well_pure, well_noisy, poor_pure, poor_noisy.
std::vector<std::string> scenario_tags();
SimScenario scenario_by_tag(const std::string& tag);

std::vector<bool> make_signal_region(const SimScenario& scenario);

// All (dx, dy) offsets, dx >= 0 and 0 <= dy <= dx, of the second disk's
// center relative to the first for which the union has `target` nodes.
std::vector<std::pair<int, int>> search_center_offsets(int r1, int r2,
                                                       std::size_t target);

ZGrid simulate(const SimScenario& scenario, std::uint64_t replication_index);

struct Evaluation {
  double fnp;
  double fdp;
  double fm;
};

Evaluation evaluate(const std::vector<bool>& selection, const std::vector<bool>& truth);
inline Evaluation evaluate(const Selection& s, const std::vector<bool>& truth) {
  return evaluate(s.mask, truth);
}

enum class MethodKind { Smdr, FdrSmoothing, BhFdr, MdrIndependent };

struct MethodSpec {
  MethodKind kind;
  double level;
  std::string tag() const;  // e.g. "smdr(beta=0.1)"
};

// Parses "smdr", "fdrs", "bh", "mdr".
MethodKind parse_method(const std::string& name);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

struct MetricsRecord {
  std::string scenario_tag;
  std::string method_tag;
  MethodSpec method{MethodKind::Smdr, 0.1};
  std::size_t replications = 0;
  std::size_t failures = 0;
  bool aborted = false;
  MeanSd mdr;
  MeanSd fdr;
  MeanSd fm_index;
  std::optional<MeanSd> s_hat_ratio;
  // Per-replication values, kept for property checks.
  std::vector<Evaluation> per_replication;
  std::vector<double> s_hat_ratios;
};

struct BenchmarkOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  AnalysisOptions analysis;
};

// Per-replication hook, called with the simulated grid, the analysis (when a
// spatial method ran), and each method's selection. Invoked serially.
using ReplicationObserver = std::function<void(
    const SimScenario&, std::uint64_t, const ZGrid&, const Analysis*,
    const std::vector<Selection>&)>;

// Runs every scenario x method cell. `sink` receives each finished record
// (serialized).
std::vector<MetricsRecord> run_benchmark(
    const std::vector<SimScenario>& scenarios, const std::vector<MethodSpec>& methods,
    const std::function<void(const MetricsRecord&)>& sink,
    const BenchmarkOptions& opts = {}, const ReplicationObserver& observer = {});

std::string record_to_json(const MetricsRecord& r);
std::string format_table(const std::vector<MetricsRecord>& records);

}  // namespace smdr
