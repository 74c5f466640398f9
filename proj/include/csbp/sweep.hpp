#pragma once
/*
 * Monte-Carlo harness: seeded phase-transition sweeps for the sparse and
 * dense solvers, the connectivity-reshuffling variant, CSV emission and a
 * small SVG chart writer.  Trials are independent tasks on a bounded worker
 * pool; every record is determined by the config alone (wall_ms excepted).
 */

#include <cstdint>
#include <string>
#include <vector>

#include "csbp/recovery.hpp"
#include "csbp/rng.hpp"

namespace csbp {

enum class SolverKind { Bp, Amp, De };

const char* solver_name(SolverKind kind);

struct SweepConfig {
  SolverKind solver = SolverKind::Amp;
  std::vector<int> n_list;
  double alpha = 0.5;
  std::vector<double> rho_grid;
  int j = 10, k = 20;        // regular ensemble parameters (bp / de)
  int trials = 100;
  std::uint64_t base_seed = 1;
  int max_iters = 0;         // 0 -> solver default (1000 bp/de, 10000 amp)
  double success_tol = 1e-8;
  double convergence_tol = 1e-10;
  int threads = 1;           // <= 0 -> hardware concurrency

  void validate() const;
  int resolved_max_iters() const;
};

struct SweepRecord {
  SolverKind solver = SolverKind::Amp;
  int n = 0, m = 0;
  double alpha = 0.0, rho = 0.0;
  int j = 0, k = 0;          // 0 for the dense ensemble
  int trial = 0;
  std::uint64_t seed = 0;    // derived stream id
  int iterations = 0;
  bool converged = false;
  double mse = 0.0;
  bool success = false;
  double wall_ms = 0.0;
};

struct AggregateRow {
  SolverKind solver = SolverKind::Amp;
  int n = 0;
  double alpha = 0.0, rho = 0.0;
  int trials = 0, successes = 0;
  double p_success = 0.0;
  double stderr_p = 0.0;  // binomial standard error sqrt(p(1-p)/trials)
};

struct SweepTable {
  std::vector<SweepRecord> records;
  std::vector<AggregateRow> aggregates;
};

/// Runs the full grid.  Per trial: derive the stream from
/// (base_seed, n, rho, trial), generate an instance, run the solver, record.
/// The output is independent of scheduling order.
SweepTable run_sweep(const SweepConfig& cfg);

/// run_sweep with the solver pinned to the connectivity-reshuffling variant:
/// each iteration re-draws the pairing (degrees preserved), re-samples edge
/// values and recomputes y, carrying messages by column-socket position.
SweepTable run_density_evolution(SweepConfig cfg);

/// Single reshuffling trial on an already-generated signal; exposed for tests.
RecoveryResult run_de_trial(int n, int m, int j, int k, const Eigen::VectorXd& truth,
                            RandomStream& rng, int max_iters, double convergence_tol,
                            double success_tol);

/// Writes the per-trial CSV at `path` and the aggregate CSV at
/// `<stem>_agg<ext>`.  Throws on an empty table.
void emit_csv(const SweepTable& table, const std::string& path);
void emit_trials_csv(const SweepTable& table, const std::string& path);
void emit_aggregate_csv(const SweepTable& table, const std::string& path);
std::string aggregate_csv_path(const std::string& trials_path);

/// Reads back an aggregate CSV (used by the round-trip checks).
std::vector<AggregateRow> load_aggregate_csv(const std::string& path);

/// Self-contained SVG of success probability vs rho, one polyline per n.
void emit_chart(const SweepTable& table, const std::string& path);

}  // namespace csbp
