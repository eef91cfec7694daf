#include <cmath>
#include <set>

#include "doctest.h"
#include "smdr/errors.hpp"
#include "smdr/simulation.hpp"

using namespace smdr;

namespace {

std::size_t region_size(const SimScenario& s) {
  std::size_t k = 0;
  for (bool b : make_signal_region(s)) k += b;
  return k;
}

std::size_t disk_size(int r) {
  std::size_t k = 0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) k += dx * dx + dy * dy <= r * r;
  return k;
}

}  // namespace

TEST_CASE("scenario catalogue") {
  const auto tags = scenario_tags();
  CHECK(tags == std::vector<std::string>{"well_pure", "well_noisy", "poor_pure", "poor_noisy"});
  CHECK(scenario_by_tag("poor_noisy").background_c == 0.05);
  CHECK(scenario_by_tag("poor_noisy").theta_law == ThetaLaw::PoorlySeparated);
  CHECK(scenario_by_tag("well_pure").background_c == 0.0);
  try {
    scenario_by_tag("bogus");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("well_noisy") != std::string::npos);
  }
}

TEST_CASE("default region has 1686 nodes") {
  CHECK(region_size(scenario_by_tag("well_pure")) == 1686);
}

TEST_CASE("disjoint and concentric disks") {
  SimScenario s = scenario_by_tag("well_pure");
  s.first = {25, 25, 15};
  s.second = {90, 90, 20};
  CHECK(region_size(s) == disk_size(15) + disk_size(20));
  s.first = {60, 60, 15};
  s.second = {60, 60, 20};
  CHECK(region_size(s) == disk_size(20));
}

TEST_CASE("disks outside the grid are rejected") {
  SimScenario s = scenario_by_tag("well_pure");
  s.first = {5, 60, 15};
  CHECK_THROWS_AS(make_signal_region(s), Error);
  s = scenario_by_tag("well_pure");
  s.background_c = 0.5;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("center search recovers the default offset") {
  const auto offsets = search_center_offsets(15, 20, 1686);
  CHECK_FALSE(offsets.empty());
  const SimScenario s = scenario_by_tag("well_pure");
  const int dx = std::abs(s.second.cx - s.first.cx), dy = std::abs(s.second.cy - s.first.cy);
  bool found = false;
  for (auto [a, b] : offsets) found |= (a == std::max(dx, dy) && b == std::min(dx, dy));
  CHECK(found);
}

TEST_CASE("pure background truth equals the region") {
  const SimScenario s = scenario_by_tag("well_pure");
  const ZGrid z = simulate(s, 0);
  REQUIRE(z.truth.has_value());
  CHECK(*z.truth == make_signal_region(s));
  CHECK(z.width == 128);
  CHECK(z.height == 128);
}

TEST_CASE("noisy background adds about 735 signals") {
  const SimScenario s = scenario_by_tag("well_noisy");
  const ZGrid z = simulate(s, 3);
  std::size_t extra = 0;
  const auto region = make_signal_region(s);
  for (std::size_t i = 0; i < region.size(); ++i) extra += (*z.truth)[i] && !region[i];
  const double mean = 0.05 * (16384 - 1686);
  const double sd = std::sqrt(mean * 0.95);
  CHECK(std::abs(extra - mean) <= 3 * sd);
}

TEST_CASE("simulation is deterministic per seed and replication") {
  const SimScenario s = scenario_by_tag("poor_noisy");
  const ZGrid a = simulate(s, 5), b = simulate(s, 5), c = simulate(s, 6);
  CHECK(a.values == b.values);
  CHECK(*a.truth == *b.truth);
  CHECK(a.values != c.values);
}

TEST_CASE("in-region statistics follow the theta law") {
  const SimScenario s = scenario_by_tag("poor_pure");
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    const ZGrid z = simulate(s, rep);
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!(*z.truth)[i]) continue;
      sum += z.values[i];
      sq += z.values[i] * z.values[i];
      ++n;
    }
  }
  const double mean = sum / n, var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.2);
  CHECK(var == doctest::Approx(10.0).epsilon(0.08));
}

TEST_CASE("evaluation examples") {
  const std::vector<bool> truth{true, true, false, false};
  const Evaluation perfect = evaluate(truth, truth);
  CHECK(perfect.fnp == 0.0);
  CHECK(perfect.fdp == 0.0);
  CHECK(perfect.fm == 1.0);
  const Evaluation empty = evaluate(std::vector<bool>(4, false), truth);
  CHECK(empty.fnp == 1.0);
  CHECK(empty.fdp == 0.0);
  CHECK(empty.fm == 0.0);
  const Evaluation half = evaluate(std::vector<bool>{true, false, true, false}, truth);
  CHECK(half.fnp == 0.5);
  CHECK(half.fdp == 0.5);
  CHECK(half.fm == doctest::Approx(0.5));
  CHECK_THROWS_AS(evaluate(truth, std::vector<bool>(4, false)), Error);
}

TEST_CASE("method tags and parsing") {
  CHECK(MethodSpec{MethodKind::Smdr, 0.1}.tag() == "smdr(beta=0.1)");
  CHECK(MethodSpec{MethodKind::BhFdr, 0.05}.tag() == "bh(alpha=0.05)");
  CHECK(parse_method("fdrs") == MethodKind::FdrSmoothing);
  CHECK(parse_method("mdr") == MethodKind::MdrIndependent);
  CHECK_THROWS_AS(parse_method("afnc"), Error);
}

TEST_CASE("small benchmark: determinism, bounds and nestedness") {
  SimScenario s = scenario_by_tag("well_pure");
  s.width = 48;
  s.height = 48;
  s.first = {18, 20, 8};
  s.second = {28, 26, 10};
  s.replications = 3;
  const std::vector<MethodSpec> methods{{MethodKind::Smdr, 0.1},
                                        {MethodKind::Smdr, 0.05},
                                        {MethodKind::BhFdr, 0.05},
                                        {MethodKind::MdrIndependent, 0.1}};
  std::vector<std::string> sunk;
  int nested_violations = 0;
  BenchmarkOptions opts;
  opts.threads = 2;
  auto observer = [&](const SimScenario&, std::uint64_t, const ZGrid&, const Analysis* a,
                      const std::vector<Selection>& sel) {
    CHECK(a != nullptr);
    for (std::size_t i = 0; i < sel[0].mask.size(); ++i) nested_violations += sel[0].mask[i] && !sel[1].mask[i];
  };
  const auto r1 = run_benchmark({s}, methods, [&](const MetricsRecord& r) { sunk.push_back(r.method_tag); },
                                opts, observer);
  const auto r2 = run_benchmark({s}, methods, {}, opts);
  CHECK(sunk.size() == methods.size());
  CHECK(nested_violations == 0);
  REQUIRE(r1.size() == methods.size());
  for (std::size_t k = 0; k < r1.size(); ++k) {
    CHECK(r1[k].replications == 3);
    CHECK(r1[k].mdr.mean == r2[k].mdr.mean);
    CHECK(r1[k].fdr.mean == r2[k].fdr.mean);
    CHECK(r1[k].fm_index.mean == r2[k].fm_index.mean);
    for (const auto& e : r1[k].per_replication) {
      CHECK(e.fm >= 0.0);
      CHECK(e.fm <= 1.0);
      CHECK(e.fm == doctest::Approx(std::sqrt((1 - e.fnp) * (1 - e.fdp))));
    }
  }
  CHECK(r1[0].s_hat_ratio.has_value());
  CHECK_FALSE(r1[2].s_hat_ratio.has_value());
  const std::string json = record_to_json(r1[0]);
  CHECK(json.find("\"method\":\"smdr(beta=0.1)\"") != std::string::npos);
  const std::string table = format_table(r1);
  CHECK(table.find("bh(alpha=0.05)") != std::string::npos);
}
