#include "smdr/smdr.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "smdr/baselines.hpp"
#include "smdr/errors.hpp"
#include "smdr/io.hpp"
#include "smdr/pipeline.hpp"
#include "smdr/screening.hpp"
#include "smdr/simulation.hpp"

struct smdr_grid {
  smdr::ZGrid z;
};

struct smdr_analysis {
  smdr::Analysis a;
  std::size_t width;
  std::size_t height;
};

struct smdr_selection {
  std::vector<uint8_t> mask;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t count = 0;
  std::size_t j_star = 0;
  std::vector<double> trace;
  std::string method;
};

struct smdr_benchmark {
  std::vector<std::string> json;
  std::string table;
};

namespace {

thread_local std::string g_last_error;

smdr_status status_of(smdr::ErrorKind kind) {
  switch (kind) {
    case smdr::ErrorKind::InvalidArgument: return SMDR_ERR_INVALID_ARGUMENT;
    case smdr::ErrorKind::Io: return SMDR_ERR_IO;
    case smdr::ErrorKind::Data: return SMDR_ERR_DATA;
    case smdr::ErrorKind::Numerical: return SMDR_ERR_NUMERICAL;
  }
  return SMDR_ERR_INTERNAL;
}

template <class F>
smdr_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SMDR_OK;
  } catch (const smdr::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return SMDR_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  smdr::require(p != nullptr, std::string(what) + " must not be null");
}

smdr_selection* wrap(const smdr::Selection& s, std::size_t width, std::size_t height) {
  auto* out = new smdr_selection;
  out->mask.resize(s.mask.size());
  for (std::size_t i = 0; i < s.mask.size(); ++i) {
    out->mask[i] = s.mask[i] ? 1 : 0;
    out->count += s.mask[i];
  }
  out->width = width;
  out->height = height;
  out->j_star = s.j_star;
  out->trace = s.bmdr_trace;
  out->method = s.method_tag;
  return out;
}

std::vector<bool> unwrap(const smdr_selection* s) {
  return std::vector<bool>(s->mask.begin(), s->mask.end());
}

}  // namespace

extern "C" {

const char* smdr_last_error(void) { return g_last_error.c_str(); }

const char* smdr_version(void) { return "0.1.0"; }

smdr_status smdr_grid_create(size_t width, size_t height, const double* values,
                             smdr_grid** out) {
  return guarded([&] {
    need(out, "out");
    need(values, "values");
    smdr::require(width > 0 && height > 0, "grid dimensions must be positive");
    std::vector<double> v(values, values + width * height);
    *out = new smdr_grid{smdr::ZGrid(width, height, std::move(v))};
  });
}

smdr_status smdr_grid_read(const char* path, smdr_grid** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new smdr_grid{smdr::read_grid_file(path)};
  });
}

smdr_status smdr_grid_write(const smdr_grid* grid, const char* path) {
  return guarded([&] {
    need(grid, "grid");
    need(path, "path");
    smdr::write_grid_file(path, grid->z);
  });
}

void smdr_grid_free(smdr_grid* grid) { delete grid; }

size_t smdr_grid_width(const smdr_grid* grid) { return grid ? grid->z.width : 0; }

size_t smdr_grid_height(const smdr_grid* grid) { return grid ? grid->z.height : 0; }

const double* smdr_grid_values(const smdr_grid* grid) {
  return grid ? grid->z.values.data() : nullptr;
}

int smdr_grid_has_truth(const smdr_grid* grid) {
  return grid && grid->z.truth.has_value() ? 1 : 0;
}

smdr_status smdr_grid_truth(const smdr_grid* grid, uint8_t* out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    smdr::require(grid->z.truth.has_value(), "grid carries no truth mask");
    const auto& t = *grid->z.truth;
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] ? 1 : 0;
  });
}

smdr_status smdr_grid_write_truth_pgm(const smdr_grid* grid, const char* path) {
  return guarded([&] {
    need(grid, "grid");
    need(path, "path");
    smdr::require(grid->z.truth.has_value(), "grid carries no truth mask");
    smdr::write_file_atomic(path, smdr::encode_pgm(smdr::mask_to_image(
                                      *grid->z.truth, grid->z.width, grid->z.height)));
  });
}

size_t smdr_scenario_count(void) { return smdr::scenario_tags().size(); }

const char* smdr_scenario_tag(size_t index) {
  static const std::vector<std::string> tags = smdr::scenario_tags();
  return index < tags.size() ? tags[index].c_str() : nullptr;
}

smdr_status smdr_simulate(const char* scenario, uint64_t seed, uint64_t replication,
                          smdr_grid** out) {
  return guarded([&] {
    need(scenario, "scenario");
    need(out, "out");
    smdr::SimScenario sc = smdr::scenario_by_tag(scenario);
    sc.seed = seed;
    *out = new smdr_grid{smdr::simulate(sc, replication)};
  });
}

void smdr_analysis_options_init(smdr_analysis_options* opts) {
  if (!opts) return;
  const smdr::AnalysisOptions d;
  opts->lambdas = nullptr;
  opts->lambda_count = 0;
  opts->empirical_null = 0;
  opts->pr_sweeps = d.density.sweeps;
  opts->pr_seed = d.density.seed;
  opts->fit_tol = d.fit.tol;
  opts->fit_max_iter = d.fit.max_iter;
}

smdr_status smdr_analyze(const smdr_grid* grid, const smdr_analysis_options* opts,
                         smdr_analysis** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    smdr::AnalysisOptions o;
    if (opts) {
      if (opts->lambda_count > 0) {
        need(opts->lambdas, "lambdas");
        o.lambdas.assign(opts->lambdas, opts->lambdas + opts->lambda_count);
      }
      o.null_kind = opts->empirical_null ? smdr::NullKind::Empirical
                                         : smdr::NullKind::Theoretical;
      o.density.sweeps = opts->pr_sweeps;
      o.density.seed = opts->pr_seed;
      o.fit.tol = opts->fit_tol;
      o.fit.max_iter = opts->fit_max_iter;
    }
    *out = new smdr_analysis{smdr::analyze(grid->z, o), grid->z.width, grid->z.height};
  });
}

void smdr_analysis_free(smdr_analysis* analysis) { delete analysis; }

double smdr_analysis_lambda(const smdr_analysis* analysis) {
  return analysis ? analysis->a.lambda() : 0.0;
}

double smdr_analysis_s_hat(const smdr_analysis* analysis) {
  return analysis ? analysis->a.posterior.s_hat : 0.0;
}

size_t smdr_analysis_node_count(const smdr_analysis* analysis) {
  return analysis ? analysis->a.posterior.w.size() : 0;
}

size_t smdr_analysis_plateau_count(const smdr_analysis* analysis) {
  return analysis ? analysis->a.prior().plateau_count : 0;
}

size_t smdr_analysis_iterations(const smdr_analysis* analysis) {
  return analysis ? analysis->a.prior().iterations : 0;
}

int smdr_analysis_converged(const smdr_analysis* analysis) {
  return analysis && analysis->a.prior().converged ? 1 : 0;
}

const double* smdr_analysis_prior(const smdr_analysis* analysis) {
  return analysis ? analysis->a.prior().c.data() : nullptr;
}

const double* smdr_analysis_posterior(const smdr_analysis* analysis) {
  return analysis ? analysis->a.posterior.w.data() : nullptr;
}

size_t smdr_analysis_path_length(const smdr_analysis* analysis) {
  return analysis ? analysis->a.path.grid.size() : 0;
}

smdr_status smdr_analysis_path_entry(const smdr_analysis* analysis, size_t index,
                                     double* lambda, double* bic, size_t* plateaus) {
  return guarded([&] {
    need(analysis, "analysis");
    const auto& p = analysis->a.path;
    smdr::require(index < p.grid.size(), "path index out of range");
    if (lambda) *lambda = p.grid[index];
    if (bic) *bic = p.bic[index];
    if (plateaus) *plateaus = p.fits[index].plateau_count;
  });
}

smdr_status smdr_screen(const smdr_analysis* analysis, double beta, smdr_selection** out) {
  return guarded([&] {
    need(analysis, "analysis");
    need(out, "out");
    *out = wrap(smdr::screen_smdr(analysis->a.posterior, beta), analysis->width,
                analysis->height);
  });
}

smdr_status smdr_fdr_smoothing(const smdr_analysis* analysis, double alpha,
                               smdr_selection** out) {
  return guarded([&] {
    need(analysis, "analysis");
    need(out, "out");
    *out = wrap(smdr::fdr_smoothing_select(analysis->a.posterior, alpha), analysis->width,
                analysis->height);
  });
}

smdr_status smdr_bh(const smdr_grid* grid, double alpha, smdr_selection** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = wrap(smdr::bh_fdr(smdr::PValueField::from_z(grid->z), alpha), grid->z.width,
                grid->z.height);
  });
}

smdr_status smdr_mdr_independent(const smdr_grid* grid, double beta, smdr_selection** out,
                                 double* s_hat) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    const smdr::IndependentMdr r = smdr::mdr_independent_detailed(grid->z, beta);
    *out = wrap(r.selection, grid->z.width, grid->z.height);
    if (s_hat) *s_hat = r.s_hat;
  });
}

smdr_status smdr_mask_read(const char* path, smdr_selection** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const smdr::GrayImage img = smdr::decode_pgm(smdr::read_file(path));
    smdr::Selection s;
    s.mask = smdr::image_to_mask(img);
    s.method_tag = "file";
    *out = wrap(s, img.width, img.height);
  });
}

void smdr_selection_free(smdr_selection* selection) { delete selection; }

size_t smdr_selection_size(const smdr_selection* selection) {
  return selection ? selection->mask.size() : 0;
}

size_t smdr_selection_width(const smdr_selection* selection) {
  return selection ? selection->width : 0;
}

size_t smdr_selection_height(const smdr_selection* selection) {
  return selection ? selection->height : 0;
}

const uint8_t* smdr_selection_mask(const smdr_selection* selection) {
  return selection ? selection->mask.data() : nullptr;
}

size_t smdr_selection_count(const smdr_selection* selection) {
  return selection ? selection->count : 0;
}

size_t smdr_selection_j_star(const smdr_selection* selection) {
  return selection ? selection->j_star : 0;
}

const char* smdr_selection_method(const smdr_selection* selection) {
  return selection ? selection->method.c_str() : "";
}

const double* smdr_selection_trace(const smdr_selection* selection, size_t* length) {
  if (length) *length = selection ? selection->trace.size() : 0;
  if (!selection || selection->trace.empty()) return nullptr;
  return selection->trace.data();
}

smdr_status smdr_selection_write_pgm(const smdr_selection* selection, const char* path) {
  return guarded([&] {
    need(selection, "selection");
    need(path, "path");
    smdr::write_file_atomic(path, smdr::encode_pgm(smdr::mask_to_image(
                                      unwrap(selection), selection->width, selection->height)));
  });
}

smdr_status smdr_selection_write_trace(const smdr_selection* selection, const char* path) {
  return guarded([&] {
    need(selection, "selection");
    need(path, "path");
    smdr::require(!selection->trace.empty(), "selection has no BMDR trace");
    smdr::write_file_atomic(path, smdr::encode_trace_csv(selection->trace));
  });
}

smdr_status smdr_evaluate(const smdr_selection* selection, const smdr_grid* truth,
                          double* fnp, double* fdp, double* fm) {
  return guarded([&] {
    need(selection, "selection");
    need(truth, "truth");
    smdr::require(truth->z.truth.has_value(), "grid carries no truth mask");
    smdr::require(truth->z.truth->size() == selection->mask.size(),
                  "selection and truth sizes differ");
    const smdr::Evaluation e = smdr::evaluate(unwrap(selection), *truth->z.truth);
    if (fnp) *fnp = e.fnp;
    if (fdp) *fdp = e.fdp;
    if (fm) *fm = e.fm;
  });
}

smdr_status smdr_render(const char* mask_path, const char* truth_path, const char* out_path) {
  return guarded([&] {
    need(mask_path, "mask_path");
    need(out_path, "out_path");
    const smdr::GrayImage mask = smdr::decode_pgm(smdr::read_file(mask_path));
    smdr::GrayImage img;
    if (truth_path) {
      const smdr::GrayImage truth = smdr::decode_pgm(smdr::read_file(truth_path));
      if (truth.width != mask.width || truth.height != mask.height) {
        smdr::fail(smdr::ErrorKind::Data, "mask and truth images differ in size");
      }
      img = smdr::render_comparison(smdr::image_to_mask(mask), smdr::image_to_mask(truth),
                                    mask.width, mask.height);
    } else {
      img = smdr::mask_to_image(smdr::image_to_mask(mask), mask.width, mask.height);
    }
    smdr::write_file_atomic(out_path, smdr::encode_pgm(img));
  });
}

smdr_status smdr_benchmark_run(const smdr_benchmark_options* opts,
                               smdr_record_callback callback, void* user,
                               smdr_benchmark** out) {
  return guarded([&] {
    need(opts, "opts");
    need(out, "out");
    smdr::require(opts->scenario_count > 0 && opts->scenarios, "no scenarios given");
    smdr::require(opts->method_count > 0 && opts->methods && opts->levels, "no methods given");
    smdr::require(opts->replications > 0, "replication count must be positive");
    std::vector<smdr::SimScenario> scenarios;
    for (std::size_t i = 0; i < opts->scenario_count; ++i) {
      need(opts->scenarios[i], "scenario tag");
      smdr::SimScenario sc = smdr::scenario_by_tag(opts->scenarios[i]);
      sc.replications = opts->replications;
      sc.seed = opts->seed;
      scenarios.push_back(sc);
    }
    std::vector<smdr::MethodSpec> methods;
    for (std::size_t i = 0; i < opts->method_count; ++i) {
      need(opts->methods[i], "method name");
      methods.push_back({smdr::parse_method(opts->methods[i]), opts->levels[i]});
    }
    smdr::BenchmarkOptions bo;
    bo.threads = opts->threads;
    auto result = std::make_unique<smdr_benchmark>();
    const auto records = smdr::run_benchmark(
        scenarios, methods,
        [&](const smdr::MetricsRecord& r) {
          result->json.push_back(smdr::record_to_json(r));
          if (callback) callback(result->json.back().c_str(), user);
        },
        bo);
    result->table = smdr::format_table(records);
    *out = result.release();
  });
}

void smdr_benchmark_free(smdr_benchmark* bench) { delete bench; }

size_t smdr_benchmark_record_count(const smdr_benchmark* bench) {
  return bench ? bench->json.size() : 0;
}

const char* smdr_benchmark_record_json(const smdr_benchmark* bench, size_t index) {
  if (!bench || index >= bench->json.size()) return nullptr;
  return bench->json[index].c_str();
}

const char* smdr_benchmark_table(const smdr_benchmark* bench) {
  return bench ? bench->table.c_str() : "";
}

smdr_status smdr_write_file_atomic(const char* path, const char* data, size_t length) {
  return guarded([&] {
    need(path, "path");
    smdr::require(data != nullptr || length == 0, "data must not be null");
    smdr::write_file_atomic(path, std::string_view(data ? data : "", length));
  });
}

}  // extern "C"
