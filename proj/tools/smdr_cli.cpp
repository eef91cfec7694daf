#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smdr/smdr.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CliFailure {
  int code;
  std::string message;
};

int exit_code(smdr_status s) {
  switch (s) {
    case SMDR_OK: return 0;
    case SMDR_ERR_INVALID_ARGUMENT: return kExitUsage;
    case SMDR_ERR_IO:
    case SMDR_ERR_DATA: return kExitData;
    case SMDR_ERR_NUMERICAL: return kExitNumerical;
    case SMDR_ERR_INTERNAL: break;
  }
  return 1;
}

void check(smdr_status s) {
  if (s != SMDR_OK) throw CliFailure{exit_code(s), smdr_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw CliFailure{kExitUsage, msg}; }

// RAII holders for the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Grid = Handle<smdr_grid, smdr_grid_free>;
using AnalysisH = Handle<smdr_analysis, smdr_analysis_free>;
using SelectionH = Handle<smdr_selection, smdr_selection_free>;
using BenchmarkH = Handle<smdr_benchmark, smdr_benchmark_free>;

std::string default_out_dir() {
  const char* env = std::getenv("SMDR_OUT_DIR");
  return env && *env ? env : ".";
}

std::string level_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_levels(const std::vector<double>& levels, const char* name) {
  if (levels.empty()) usage_error(std::string("--") + name + " needs at least one value");
  for (double v : levels) {
    if (!(v > 0.0 && v < 1.0)) {
      usage_error(std::string("--") + name + " values must lie in (0,1), got " + level_text(v));
    }
  }
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliFailure{kExitData, "cannot create output directory " + dir.string() + ": " +
                                          ec.message()};
}

void write_text(const fs::path& path, const std::string& text) {
  check(smdr_write_file_atomic(path.c_str(), text.data(), text.size()));
}

struct SimulateArgs {
  std::string scenario;
  std::uint64_t seed = 20240101;
  std::uint64_t replication = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  Grid g;
  check(smdr_simulate(a.scenario.c_str(), a.seed, a.replication, g.out()));
  const fs::path dir = a.out.empty() ? default_out_dir() : a.out;
  make_dir(dir);
  check(smdr_grid_write(g.get(), (dir / "z.grid").c_str()));
  check(smdr_grid_write_truth_pgm(g.get(), (dir / "truth.pgm").c_str()));
  std::cout << "wrote " << (dir / "z.grid").string() << " and " << (dir / "truth.pgm").string()
            << "\n";
  return 0;
}

struct ScreenArgs {
  std::string input;
  std::vector<double> beta{0.1};
  std::string lambda = "auto";
  std::string null_kind = "theoretical";
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<double> parse_lambdas(const std::string& text) {
  if (text == "auto") return {};
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error("--lambda expects \"auto\" or a comma-separated list, got '" + item + "'");
    }
  }
  if (out.empty()) usage_error("--lambda list is empty");
  return out;
}

int run_screen(const ScreenArgs& a) {
  check_levels(a.beta, "beta");
  const std::vector<double> lambdas = parse_lambdas(a.lambda);
  if (a.null_kind != "theoretical" && a.null_kind != "empirical") {
    usage_error("--null must be theoretical or empirical");
  }

  Grid g;
  check(smdr_grid_read(a.input.c_str(), g.out()));
  smdr_analysis_options opts;
  smdr_analysis_options_init(&opts);
  opts.lambdas = lambdas.empty() ? nullptr : lambdas.data();
  opts.lambda_count = lambdas.size();
  opts.empirical_null = a.null_kind == "empirical";
  opts.pr_seed = a.seed;
  AnalysisH an;
  check(smdr_analyze(g.get(), &opts, an.out()));

  std::vector<SelectionH> sels;
  for (double b : a.beta) {
    SelectionH s;
    check(smdr_screen(an.get(), b, s.out()));
    sels.push_back(std::move(s));
  }

  // Everything is computed before the first file is written.
  const fs::path dir = a.out.empty() ? default_out_dir() : a.out;
  make_dir(dir);
  nlohmann::ordered_json summary;
  summary["input"] = a.input;
  summary["width"] = smdr_grid_width(g.get());
  summary["height"] = smdr_grid_height(g.get());
  summary["lambda"] = smdr_analysis_lambda(an.get());
  summary["s_hat"] = smdr_analysis_s_hat(an.get());
  summary["plateaus"] = smdr_analysis_plateau_count(an.get());
  summary["converged"] = smdr_analysis_converged(an.get()) != 0;
  summary["trace"] = "trace.csv";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < sels.size(); ++k) {
    const std::string name = "mask_beta_" + level_text(a.beta[k]) + ".pgm";
    check(smdr_selection_write_pgm(sels[k].get(), (dir / name).c_str()));
    rows.push_back({{"beta", a.beta[k]},
                    {"j_star", smdr_selection_j_star(sels[k].get())},
                    {"selected", smdr_selection_count(sels[k].get())},
                    {"mask", name}});
  }
  summary["selections"] = rows;
  check(smdr_selection_write_trace(sels.front().get(), (dir / "trace.csv").c_str()));
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct BenchmarkArgs {
  int table = 1;
  std::size_t reps = 20;
  std::vector<std::string> methods;
  std::vector<std::string> scenarios;
  std::vector<double> beta{0.1};
  std::vector<double> alpha{0.05};
  std::uint64_t seed = 20240101;
  std::size_t threads = 0;
  std::string out;
};

int run_benchmark(const BenchmarkArgs& a) {
  if (a.table < 1 || a.table > 3) usage_error("--table must be 1, 2 or 3");
  if (a.reps == 0) usage_error("--reps must be positive");
  check_levels(a.beta, "beta");
  check_levels(a.alpha, "alpha");
  std::vector<std::string> methods = a.methods;
  if (methods.empty()) {
    if (a.table == 1) methods = {"bh", "fdrs", "smdr"};
    else methods = {"mdr", "smdr"};
  }
  std::vector<std::string> scenarios = a.scenarios;
  if (scenarios.empty()) {
    for (std::size_t i = 0; i < smdr_scenario_count(); ++i) scenarios.push_back(smdr_scenario_tag(i));
  }

  std::vector<std::string> names;
  std::vector<double> levels;
  for (const auto& m : methods) {
    const bool fdr_type = m == "bh" || m == "fdrs";
    for (double v : fdr_type ? a.alpha : a.beta) {
      names.push_back(m);
      levels.push_back(v);
    }
  }
  std::vector<const char*> name_ptrs, scenario_ptrs;
  for (const auto& n : names) name_ptrs.push_back(n.c_str());
  for (const auto& s : scenarios) scenario_ptrs.push_back(s.c_str());

  if (a.reps == 1) {
    std::cerr << "warning: a single replication reports every standard deviation as 0\n";
  }
  const fs::path dir = a.out.empty() ? default_out_dir() : a.out;

  smdr_benchmark_options opts{};
  opts.scenarios = scenario_ptrs.data();
  opts.scenario_count = scenario_ptrs.size();
  opts.methods = name_ptrs.data();
  opts.levels = levels.data();
  opts.method_count = name_ptrs.size();
  opts.replications = a.reps;
  opts.seed = a.seed;
  opts.threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  BenchmarkH b;
  check(smdr_benchmark_run(
      &opts, [](const char* json, void*) { std::cerr << json << "\n"; }, nullptr, b.out()));

  std::string jsonl;
  for (std::size_t i = 0; i < smdr_benchmark_record_count(b.get()); ++i) {
    jsonl += smdr_benchmark_record_json(b.get(), i);
    jsonl += '\n';
  }
  const std::string table = smdr_benchmark_table(b.get());
  make_dir(dir);
  const std::string stem = "table" + std::to_string(a.table);
  write_text(dir / (stem + ".jsonl"), jsonl);
  write_text(dir / (stem + ".txt"), table);
  std::cout << table;
  return 0;
}

struct RenderArgs {
  std::string mask;
  std::string truth;
  std::string out;
};

int run_render(const RenderArgs& a) {
  const fs::path out = a.out.empty() ? fs::path(default_out_dir()) / "render.pgm" : fs::path(a.out);
  if (out.has_parent_path()) make_dir(out.parent_path());
  check(smdr_render(a.mask.c_str(), a.truth.empty() ? nullptr : a.truth.c_str(), out.c_str()));
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial MDR screening for z-statistic grids"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Generate a synthetic z-grid and truth mask");
  cmd_sim->add_option("--scenario", sim.scenario, "well_pure, well_noisy, poor_pure, poor_noisy")
      ->required();
  cmd_sim->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  cmd_sim->add_option("--replication", sim.replication, "Replication index")
      ->capture_default_str();
  cmd_sim->add_option("--out", sim.out, "Output directory (default $SMDR_OUT_DIR or .)");

  ScreenArgs scr;
  auto* cmd_scr = app.add_subcommand("screen", "Run the spatial MDR screen on a z-grid");
  cmd_scr->add_option("--input", scr.input, "Grid file (binary grid or CSV)")->required();
  cmd_scr->add_option("--beta", scr.beta, "Control levels")->delimiter(',')->capture_default_str();
  cmd_scr->add_option("--lambda", scr.lambda, "\"auto\" or a comma-separated grid")
      ->capture_default_str();
  cmd_scr->add_option("--null", scr.null_kind, "theoretical or empirical")->capture_default_str();
  cmd_scr->add_option("--seed", scr.seed, "Density estimation seed")->capture_default_str();
  cmd_scr->add_option("--out", scr.out, "Output directory (default $SMDR_OUT_DIR or .)");

  BenchmarkArgs bench;
  auto* cmd_bench = app.add_subcommand("benchmark", "Replicated simulation benchmark");
  cmd_bench->add_option("--table", bench.table, "1, 2 or 3")->capture_default_str();
  cmd_bench->add_option("--reps", bench.reps, "Replications per scenario")->capture_default_str();
  cmd_bench->add_option("--methods", bench.methods, "smdr, fdrs, bh, mdr")->delimiter(',');
  cmd_bench->add_option("--scenarios", bench.scenarios, "Scenario tags")->delimiter(',');
  cmd_bench->add_option("--beta", bench.beta, "Levels for smdr and mdr")->delimiter(',')
      ->capture_default_str();
  cmd_bench->add_option("--alpha", bench.alpha, "Levels for bh and fdrs")->delimiter(',')
      ->capture_default_str();
  cmd_bench->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
  cmd_bench->add_option("--threads", bench.threads, "Worker threads (0: all cores)")
      ->capture_default_str();
  cmd_bench->add_option("--out", bench.out, "Output directory (default $SMDR_OUT_DIR or .)");

  RenderArgs ren;
  auto* cmd_ren = app.add_subcommand("render", "Render a mask, optionally against a truth mask");
  cmd_ren->add_option("--mask", ren.mask, "Mask PGM")->required();
  cmd_ren->add_option("--truth", ren.truth, "Truth PGM");
  cmd_ren->add_option("--out", ren.out, "Output PGM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cmd_sim) return run_simulate(sim);
    if (*cmd_scr) return run_screen(scr);
    if (*cmd_bench) return run_benchmark(bench);
    if (*cmd_ren) return run_render(ren);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
