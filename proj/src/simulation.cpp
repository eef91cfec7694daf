#include "smdr/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "smdr/baselines.hpp"
#include "smdr/errors.hpp"

namespace smdr {

namespace {

bool inside(const Circle& c, long x, long y) {
  const long dx = x - c.cx, dy = y - c.cy;
  return dx * dx + dy * dy <= static_cast<long>(c.radius) * c.radius;
}

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd out;
  if (v.empty()) return out;
  const double n = static_cast<double>(v.size());
  for (double x : v) out.mean += x;
  out.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::string format_level(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool is_spatial(MethodKind k) {
  return k == MethodKind::Smdr || k == MethodKind::FdrSmoothing;
}

}  // namespace

void SimScenario::validate() const {
  require(width >= 1 && height >= 1, "scenario dimensions must be positive");
  require(background_c >= 0.0 && background_c < 0.5,
          "background_c must lie in [0, 0.5)");
  require(replications >= 1, "scenario needs at least one replication");
  for (const Circle& c : {first, second}) {
    require(c.radius >= 0, "circle radius must be nonnegative");
    const bool fits = c.cx - c.radius >= 0 && c.cy - c.radius >= 0 &&
                      c.cx + c.radius < static_cast<long>(width) &&
                      c.cy + c.radius < static_cast<long>(height);
    require(fits, "signal circle extends outside the grid");
  }
}

DensityModel SimScenario::true_model() const {
  const DensityModel null = DensityModel::theoretical_null();
  if (theta_law == ThetaLaw::WellSeparated) {
    return null.with_alternative(
        {{0.5, -2.0, std::sqrt(2.0)}, {0.5, 2.0, std::sqrt(2.0)}}, -20.0, 20.0);
  }
  return null.with_alternative({{1.0, 0.0, std::sqrt(10.0)}}, -20.0, 20.0);
}

std::vector<std::string> scenario_tags() {
  return {"well_pure", "well_noisy", "poor_pure", "poor_noisy"};
}

SimScenario scenario_by_tag(const std::string& tag) {
  SimScenario s;
  s.tag = tag;
  if (tag == "well_pure") {
    s.theta_law = ThetaLaw::WellSeparated;
  } else if (tag == "well_noisy") {
    s.theta_law = ThetaLaw::WellSeparated;
    s.background_c = 0.05;
  } else if (tag == "poor_pure") {
    s.theta_law = ThetaLaw::PoorlySeparated;
  } else if (tag == "poor_noisy") {
    s.theta_law = ThetaLaw::PoorlySeparated;
    s.background_c = 0.05;
  } else {
    std::string valid;
    for (const auto& t : scenario_tags()) valid += (valid.empty() ? "" : ", ") + t;
    fail(ErrorKind::InvalidArgument,
         "unknown scenario '" + tag + "' (valid: " + valid + ")");
  }
  return s;
}

std::vector<bool> make_signal_region(const SimScenario& scenario) {
  scenario.validate();
  std::vector<bool> mask(scenario.width * scenario.height, false);
  for (std::size_t y = 0; y < scenario.height; ++y) {
    for (std::size_t x = 0; x < scenario.width; ++x) {
      const auto lx = static_cast<long>(x), ly = static_cast<long>(y);
      mask[y * scenario.width + x] =
          inside(scenario.first, lx, ly) || inside(scenario.second, lx, ly);
    }
  }
  return mask;
}

std::vector<std::pair<int, int>> search_center_offsets(int r1, int r2,
                                                       std::size_t target) {
  std::vector<std::pair<int, int>> found;
  const Circle a{0, 0, r1};
  auto disk_size = [](int r) {
    std::size_t count = 0;
    for (long x = -r; x <= r; ++x)
      for (long y = -r; y <= r; ++y) count += x * x + y * y <= long(r) * r;
    return count;
  };
  const std::size_t total = disk_size(r1) + disk_size(r2);
  for (int dx = 0; dx <= r1 + r2 + 1; ++dx) {
    for (int dy = 0; dy <= dx; ++dy) {
      const Circle b{dx, dy, r2};
      std::size_t overlap = 0;
      for (long x = -r1; x <= r1; ++x)
        for (long y = -r1; y <= r1; ++y) overlap += inside(a, x, y) && inside(b, x, y);
      if (total - overlap == target) found.emplace_back(dx, dy);
    }
  }
  return found;
}

ZGrid simulate(const SimScenario& scenario, std::uint64_t replication_index) {
  const std::vector<bool> region = make_signal_region(scenario);
  auto rng = replication_rng(scenario.seed, replication_index);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = region.size();
  std::vector<double> values(n);
  std::vector<bool> truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool signal = region[i];
    if (!signal) signal = unif(rng) < scenario.background_c;
    double theta = 0.0;
    if (signal) {
      if (scenario.theta_law == ThetaLaw::WellSeparated) {
        const double centre = unif(rng) < 0.5 ? -2.0 : 2.0;
        theta = centre + normal(rng);
      } else {
        theta = 3.0 * normal(rng);
      }
    }
    values[i] = theta + normal(rng);
    truth[i] = signal;
  }
  return ZGrid(scenario.width, scenario.height, std::move(values), std::move(truth));
}

Evaluation evaluate(const std::vector<bool>& selection, const std::vector<bool>& truth) {
  require(selection.size() == truth.size(), "selection and truth differ in size");
  std::size_t signals = 0, selected = 0, missed = 0, false_pos = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    signals += truth[i];
    selected += selection[i];
    missed += truth[i] && !selection[i];
    false_pos += !truth[i] && selection[i];
  }
  if (signals == 0) fail(ErrorKind::Data, "truth mask has no signals");
  Evaluation e;
  e.fnp = static_cast<double>(missed) / static_cast<double>(signals);
  e.fdp = static_cast<double>(false_pos) / static_cast<double>(std::max<std::size_t>(1, selected));
  e.fm = std::sqrt((1.0 - e.fnp) * (1.0 - e.fdp));
  return e;
}

std::string MethodSpec::tag() const {
  switch (kind) {
    case MethodKind::Smdr: return "smdr(beta=" + format_level(level) + ")";
    case MethodKind::FdrSmoothing: return "fdrs(alpha=" + format_level(level) + ")";
    case MethodKind::BhFdr: return "bh(alpha=" + format_level(level) + ")";
    case MethodKind::MdrIndependent: return "mdr(beta=" + format_level(level) + ")";
  }
  return "unknown";
}

MethodKind parse_method(const std::string& name) {
  if (name == "smdr") return MethodKind::Smdr;
  if (name == "fdrs") return MethodKind::FdrSmoothing;
  if (name == "bh") return MethodKind::BhFdr;
  if (name == "mdr") return MethodKind::MdrIndependent;
  fail(ErrorKind::InvalidArgument,
       "unknown method '" + name + "' (valid: smdr, fdrs, bh, mdr)");
}

std::vector<MetricsRecord> run_benchmark(
    const std::vector<SimScenario>& scenarios, const std::vector<MethodSpec>& methods,
    const std::function<void(const MetricsRecord&)>& sink, const BenchmarkOptions& opts,
    const ReplicationObserver& observer) {
  require(!methods.empty(), "no methods requested");
  for (const auto& s : scenarios) s.validate();
  const bool need_spatial = std::any_of(methods.begin(), methods.end(),
                                        [](const MethodSpec& m) { return is_spatial(m.kind); });
  std::size_t threads = opts.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<MetricsRecord> all;
  std::mutex mu;
  for (const SimScenario& scenario : scenarios) {
    const std::size_t reps = scenario.replications;
    struct Outcome {
      std::optional<Evaluation> eval;
      std::optional<double> ratio;
    };
    std::vector<std::vector<Outcome>> outcomes(methods.size(), std::vector<Outcome>(reps));

    auto run_one = [&](std::size_t rep) {
      const ZGrid z = simulate(scenario, rep);
      const std::vector<bool>& truth = *z.truth;
      const double s = static_cast<double>(std::count(truth.begin(), truth.end(), true));
      std::optional<Analysis> analysis;
      if (need_spatial) {
        try {
          analysis = analyze(z, opts.analysis);
        } catch (const Error&) {
          analysis.reset();
        }
      }
      std::optional<IndependentMdr> independent;
      bool independent_failed = false;
      std::vector<Selection> selections(methods.size());
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const MethodSpec& spec = methods[m];
        Outcome out;
        try {
          switch (spec.kind) {
            case MethodKind::Smdr:
              if (!analysis) break;
              selections[m] = screen_smdr(analysis->posterior, spec.level);
              out.ratio = analysis->posterior.s_hat / s;
              break;
            case MethodKind::FdrSmoothing:
              if (!analysis) break;
              selections[m] = fdr_smoothing_select(analysis->posterior, spec.level);
              break;
            case MethodKind::BhFdr:
              selections[m] = bh_fdr(PValueField::from_z(z), spec.level);
              break;
            case MethodKind::MdrIndependent:
              if (independent_failed) break;
              independent = mdr_independent_detailed(z, spec.level);
              selections[m] = independent->selection;
              out.ratio = independent->s_hat / s;
              break;
          }
          if (!selections[m].mask.empty()) {
            selections[m].method_tag = spec.tag();
            out.eval = evaluate(selections[m], truth);
          }
        } catch (const Error&) {
          if (spec.kind == MethodKind::MdrIndependent) independent_failed = true;
          out = Outcome{};
        }
        if (!out.eval) out.ratio.reset();
        outcomes[m][rep] = out;
      }
      if (observer) {
        std::lock_guard lock(mu);
        observer(scenario, rep, z, analysis ? &*analysis : nullptr, selections);
      }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t rep = next++; rep < reps; rep = next++) run_one(rep);
    };
    if (threads <= 1 || reps == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < std::min(threads, reps); ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
      MetricsRecord rec;
      rec.scenario_tag = scenario.tag;
      rec.method = methods[m];
      rec.method_tag = methods[m].tag();
      rec.replications = reps;
      std::vector<double> fnp, fdp, fm;
      for (const Outcome& o : outcomes[m]) {
        if (!o.eval) {
          ++rec.failures;
          continue;
        }
        rec.per_replication.push_back(*o.eval);
        fnp.push_back(o.eval->fnp);
        fdp.push_back(o.eval->fdp);
        fm.push_back(o.eval->fm);
        if (o.ratio) rec.s_hat_ratios.push_back(*o.ratio);
      }
      rec.aborted = static_cast<double>(rec.failures) > 0.1 * static_cast<double>(reps);
      rec.mdr = mean_sd(fnp);
      rec.fdr = mean_sd(fdp);
      rec.fm_index = mean_sd(fm);
      if (!rec.s_hat_ratios.empty()) rec.s_hat_ratio = mean_sd(rec.s_hat_ratios);
      {
        std::lock_guard lock(mu);
        if (sink) sink(rec);
      }
      all.push_back(std::move(rec));
    }
  }
  return all;
}

std::string record_to_json(const MetricsRecord& r) {
  auto ms = [](const MeanSd& v) { return nlohmann::json{{"mean", v.mean}, {"sd", v.sd}}; };
  nlohmann::json j;
  j["scenario"] = r.scenario_tag;
  j["method"] = r.method_tag;
  j["level"] = r.method.level;
  j["replications"] = r.replications;
  j["failures"] = r.failures;
  j["aborted"] = r.aborted;
  j["mdr"] = ms(r.mdr);
  j["fdr"] = ms(r.fdr);
  j["fm_index"] = ms(r.fm_index);
  j["s_hat_ratio"] = r.s_hat_ratio ? ms(*r.s_hat_ratio) : nlohmann::json(nullptr);
  return j.dump();
}

std::string format_table(const std::vector<MetricsRecord>& records) {
  auto cell = [](const MeanSd& v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f (%.3f)", v.mean, v.sd);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Scenario", "Method", "MDR", "FDR", "FM-index", "s_hat/s", "Failures"});
  for (const auto& r : records) {
    if (r.aborted) {
      rows.push_back({r.scenario_tag, r.method_tag, "aborted", "-", "-", "-",
                      std::to_string(r.failures)});
      continue;
    }
    rows.push_back({r.scenario_tag, r.method_tag, cell(r.mdr), cell(r.fdr),
                    cell(r.fm_index), r.s_hat_ratio ? cell(*r.s_hat_ratio) : "-",
                    std::to_string(r.failures)});
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t c = 0; c < rows[k].size(); ++c) {
      os << rows[k][c] << std::string(width[c] - rows[k][c].size(), ' ');
      os << (c + 1 < rows[k].size() ? "  " : "\n");
    }
    if (k == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      os << std::string(total - 2, '-') << '\n';
    }
  }
  return os.str();
}

}  // namespace smdr
