#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "csbp/sweep.hpp"

using namespace csbp;

namespace {

SweepConfig small_bp_cfg() {
  SweepConfig cfg;
  cfg.solver = SolverKind::Bp;
  cfg.n_list = {40};
  cfg.alpha = 0.5;
  cfg.rho_grid = {0.0, 0.1};
  cfg.j = 10;
  cfg.k = 20;
  cfg.trials = 8;
  cfg.base_seed = 9;
  cfg.threads = 2;
  return cfg;
}

bool records_equal_ignoring_wall(const SweepRecord& a, const SweepRecord& b) {
  const bool mse_equal = (a.mse == b.mse) || (std::isnan(a.mse) && std::isnan(b.mse));
  return a.solver == b.solver && a.n == b.n && a.m == b.m && a.alpha == b.alpha && a.rho == b.rho &&
         a.j == b.j && a.k == b.k && a.trial == b.trial && a.seed == b.seed &&
         a.iterations == b.iterations && a.converged == b.converged && mse_equal &&
         a.success == b.success;
}

}  // namespace

TEST_CASE("zero-density grid points always succeed") {
  SweepConfig cfg = small_bp_cfg();
  cfg.rho_grid = {0.0};
  const auto table = run_sweep(cfg);
  REQUIRE(table.aggregates.size() == 1);
  CHECK(table.aggregates[0].p_success == 1.0);
  CHECK(table.aggregates[0].stderr_p == 0.0);

  SweepConfig amp_cfg = cfg;
  amp_cfg.solver = SolverKind::Amp;
  amp_cfg.n_list = {50};
  const auto amp_table = run_sweep(amp_cfg);
  CHECK(amp_table.aggregates[0].p_success == 1.0);

  SweepConfig de_cfg = cfg;
  de_cfg.solver = SolverKind::De;
  de_cfg.trials = 4;
  const auto de_table = run_density_evolution(de_cfg);
  CHECK(de_table.aggregates[0].p_success == 1.0);
}

TEST_CASE("sweeps are deterministic given the config (wall time excepted)") {
  const SweepConfig cfg = small_bp_cfg();
  const auto t1 = run_sweep(cfg);
  const auto t2 = run_sweep(cfg);
  REQUIRE(t1.records.size() == t2.records.size());
  for (std::size_t r = 0; r < t1.records.size(); ++r)
    CHECK(records_equal_ignoring_wall(t1.records[r], t2.records[r]));
  REQUIRE(t1.aggregates.size() == t2.aggregates.size());
  for (std::size_t a = 0; a < t1.aggregates.size(); ++a) {
    CHECK(t1.aggregates[a].successes == t2.aggregates[a].successes);
    CHECK(t1.aggregates[a].p_success == t2.aggregates[a].p_success);
  }
}

TEST_CASE("aggregation does not depend on the thread count") {
  SweepConfig cfg = small_bp_cfg();
  cfg.threads = 1;
  const auto serial = run_sweep(cfg);
  cfg.threads = 4;
  const auto parallel = run_sweep(cfg);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (std::size_t r = 0; r < serial.records.size(); ++r)
    CHECK(records_equal_ignoring_wall(serial.records[r], parallel.records[r]));
}

TEST_CASE("changing one grid point leaves the other points' trials untouched") {
  SweepConfig cfg = small_bp_cfg();
  cfg.rho_grid = {0.1, 0.2};
  const auto a = run_sweep(cfg);
  cfg.rho_grid = {0.1, 0.3};
  const auto b = run_sweep(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    CHECK(a.records[t].seed == b.records[t].seed);
    CHECK(a.records[t].mse == b.records[t].mse);
  }
  // and the changed point gets different streams
  bool any_diff = false;
  for (int t = 0; t < cfg.trials; ++t)
    any_diff |= a.records[cfg.trials + t].seed != b.records[cfg.trials + t].seed;
  CHECK(any_diff);
}

TEST_CASE("csv emission, reload, and failure modes") {
  const SweepConfig cfg = small_bp_cfg();
  const auto table = run_sweep(cfg);
  const std::string path = "csbp_test_sweep.csv";
  emit_csv(table, path);

  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "solver,n,m,alpha,rho,j,k,trial,seed,iterations,converged,mse,success,wall_ms");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(table.records.size()));
  }

  const std::string agg_path = aggregate_csv_path(path);
  const auto rows = load_aggregate_csv(agg_path);
  REQUIRE(rows.size() == table.aggregates.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    CHECK(rows[a].n == table.aggregates[a].n);
    CHECK(rows[a].rho == table.aggregates[a].rho);          // bit-exact reload
    CHECK(rows[a].p_success == table.aggregates[a].p_success);
    CHECK(rows[a].stderr_p == table.aggregates[a].stderr_p);
  }
  std::remove(path.c_str());
  std::remove(agg_path.c_str());

  const SweepTable empty;
  CHECK_THROWS_AS(emit_csv(empty, "unused.csv"), std::invalid_argument);
  CHECK_THROWS_AS(emit_chart(empty, "unused.svg"), std::invalid_argument);
}

TEST_CASE("single-record table emits a header and one row") {
  SweepTable table;
  SweepRecord rec;
  rec.solver = SolverKind::Amp;
  rec.n = 10;
  rec.m = 5;
  rec.alpha = 0.5;
  rec.rho = 0.1;
  rec.mse = 1e-12;
  rec.success = true;
  table.records.push_back(rec);
  const std::string path = "csbp_test_single.csv";
  emit_trials_csv(table, path);
  std::ifstream in(path);
  std::string header, row, extra;
  CHECK(std::getline(in, header));
  CHECK(std::getline(in, row));
  CHECK(!std::getline(in, extra));
  CHECK(row.substr(0, 4) == "amp,");
  std::remove(path.c_str());
}

TEST_CASE("chart output is a self-contained svg with one polyline per size") {
  SweepConfig cfg = small_bp_cfg();
  cfg.n_list = {40, 80};
  cfg.rho_grid = {0.0, 0.05, 0.1};
  cfg.trials = 4;
  const auto table = run_sweep(cfg);
  const std::string path = "csbp_test_chart.svg";
  emit_chart(table, path);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content.find("<svg") != std::string::npos);
  CHECK(content.find("</svg>") != std::string::npos);
  int polylines = 0;
  for (std::size_t pos = 0; (pos = content.find("<polyline", pos)) != std::string::npos; ++pos)
    ++polylines;
  CHECK(polylines == 2);
  std::remove(path.c_str());
}

TEST_CASE("config validation") {
  SweepConfig cfg = small_bp_cfg();
  cfg.rho_grid.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_bp_cfg();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_bp_cfg();
  cfg.n_list = {41};  // 41*10 != 20*20 + m=20.5 rounds to 21: n*j != m*k
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_bp_cfg();
  CHECK(cfg.resolved_max_iters() == 1000);
  cfg.solver = SolverKind::Amp;
  CHECK(cfg.resolved_max_iters() == 10000);
  cfg.max_iters = 77;
  CHECK(cfg.resolved_max_iters() == 77);
}

TEST_CASE("success-probability curves steepen with n around the sparse transition") {
  // subcritical and supercritical points on both sides of the crossing; the
  // larger size must not be worse below nor better above, up to 3-sigma
  // binomial slack
  SweepConfig cfg;
  cfg.solver = SolverKind::Bp;
  cfg.n_list = {3200, 6400};
  cfg.alpha = 0.5;
  cfg.rho_grid = {0.13, 0.20};
  cfg.j = 10;
  cfg.k = 20;
  cfg.trials = 50;
  cfg.base_seed = 17;
  cfg.threads = 0;
  const auto table = run_sweep(cfg);
  REQUIRE(table.aggregates.size() == 4);
  const auto& low_small = table.aggregates[0];   // n=3200, rho=0.13
  const auto& high_small = table.aggregates[1];  // n=3200, rho=0.20
  const auto& low_big = table.aggregates[2];     // n=6400, rho=0.13
  const auto& high_big = table.aggregates[3];    // n=6400, rho=0.20
  auto slack = [](const AggregateRow& a, const AggregateRow& b) {
    return 3.0 * std::sqrt(a.stderr_p * a.stderr_p + b.stderr_p * b.stderr_p);
  };
  CHECK(low_big.p_success >= low_small.p_success - slack(low_big, low_small));
  CHECK(high_big.p_success <= high_small.p_success + slack(high_big, high_small));
  CHECK(low_small.p_success > 0.5);   // well below the crossing
  CHECK(high_small.p_success < 0.5);  // well above it
}
