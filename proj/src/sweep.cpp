#include "csbp/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "csbp/amp_solver.hpp"
#include "csbp/bp_solver.hpp"
#include "csbp/instance.hpp"

namespace csbp {

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Bp: return "bp";
    case SolverKind::Amp: return "amp";
    case SolverKind::De: return "de";
  }
  return "?";
}

void SweepConfig::validate() const {
  if (n_list.empty()) throw std::invalid_argument("SweepConfig: n list is empty");
  if (rho_grid.empty()) throw std::invalid_argument("SweepConfig: rho grid is empty");
  if (trials < 1) throw std::invalid_argument("SweepConfig: need trials >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("SweepConfig: alpha must lie in (0, 1)");
  if (!(success_tol > 0.0)) throw std::invalid_argument("SweepConfig: success_tol must be positive");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("SweepConfig: convergence_tol must be >= 0");
  for (double rho : rho_grid)
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("SweepConfig: rho values must lie in [0, 1]");
  for (int n : n_list) {
    const int m = static_cast<int>(std::lround(alpha * n));
    if (m <= 0 || m >= n) throw std::invalid_argument("SweepConfig: alpha*n must give 0 < m < n");
    if (solver != SolverKind::Amp) {
      EnsembleSpec::regular(n, m, j, k);  // throws with the detailed reason
    }
  }
}

int SweepConfig::resolved_max_iters() const {
  if (max_iters > 0) return max_iters;
  return solver == SolverKind::Amp ? 10000 : 1000;
}

RecoveryResult run_de_trial(int n, int m, int j, int k, const Eigen::VectorXd& truth,
                            RandomStream& rng, int max_iters, double convergence_tol,
                            double success_tol) {
  const int e_count = n * j;
  BpConfig cfg;
  cfg.max_iters = 1;  // unused; sweeps are driven here
  EdgeMessageState state = EdgeMessageState::init(e_count, cfg.init_c);
  Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(n);
  SignalVector sig;
  sig.values = truth;
  std::vector<double> values(static_cast<std::size_t>(e_count));

  RecoveryResult result;
  std::uint64_t ops = 0;
  bool converged = false;
  int sweeps = 0;

  auto redraw = [&]() {
    RegularPairing pairing = draw_regular_pairing(n, m, j, k, rng);
    for (double& v : values) v = rng.normal();
    SparseMeasurementMatrix F = matrix_from_pairing(pairing, values);
    Eigen::VectorXd y = measure(F, sig).values;
    return std::pair<SparseMeasurementMatrix, Eigen::VectorXd>(std::move(F), std::move(y));
  };

  // The pairing is re-drawn before every iteration, with the variable-side
  // (A, B) messages riding across the rewire by column-socket position; the
  // check-side messages are recomputed on the fresh graph before they meet
  // its y, so the measurement constraint stays aligned with the current
  // connectivity.  The first variable update seeds (A, B) from the standard
  // C = 1, D = 0 start on a throwaway draw.
  {
    auto [f0, y0] = redraw();
    ops += update_variable_to_check(state, f0, y0, cfg);
  }

  for (int it = 1; it <= max_iters; ++it) {
    auto [F, y] = redraw();
    try {
      ops += update_check_to_variable(state, F, cfg);
      ops += update_variable_to_check(state, F, y, cfg);
      result = finalize(state, F, y);
    } catch (const std::invalid_argument&) {
      result.x_hat = x_prev;
      sweeps = it;
      break;
    }
    ops += result.ops;
    sweeps = it;
    if (!result.x_hat.allFinite()) {
      result.x_hat = x_prev;
      break;
    }
    const double delta = (result.x_hat - x_prev).lpNorm<Eigen::Infinity>();
    x_prev = result.x_hat;
    const bool dead_state = y.lpNorm<Eigen::Infinity>() != 0.0 &&
                            result.x_hat.lpNorm<Eigen::Infinity>() == 0.0;
    if (delta < convergence_tol && !dead_state) {
      converged = true;
      break;
    }
  }

  result.iterations = sweeps;
  result.converged = converged;
  result.ops = ops;
  const double mse = (result.x_hat - truth).squaredNorm() / static_cast<double>(n);
  result.mse_vs_truth = mse;
  result.success = mse < success_tol;
  return result;
}

namespace {

SweepRecord run_one_trial(const SweepConfig& cfg, int n, double rho, int trial) {
  SweepRecord rec;
  rec.solver = cfg.solver;
  rec.n = n;
  rec.m = static_cast<int>(std::lround(cfg.alpha * n));
  rec.alpha = cfg.alpha;
  rec.rho = rho;
  rec.j = cfg.solver == SolverKind::Amp ? 0 : cfg.j;
  rec.k = cfg.solver == SolverKind::Amp ? 0 : cfg.k;
  rec.trial = trial;
  rec.seed = trial_stream(cfg.base_seed, static_cast<std::uint64_t>(n), rho,
                          static_cast<std::uint64_t>(trial));

  RandomStream rng(RngSeed{cfg.base_seed, rec.seed});
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (cfg.solver) {
      case SolverKind::Bp: {
        const EnsembleSpec spec = EnsembleSpec::regular(n, rec.m, cfg.j, cfg.k);
        const SparseMeasurementMatrix F = gen_regular_sparse_matrix(spec, rng);
        const SignalVector x0 = gen_signal(n, rho, rng);
        const MeasurementVector y = measure(F, x0);
        BpConfig bp;
        bp.max_iters = cfg.resolved_max_iters();
        bp.convergence_tol = cfg.convergence_tol;
        const RecoveryResult r = run_bp(F, y.values, bp, &x0.values, cfg.success_tol);
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.mse = *r.mse_vs_truth;
        rec.success = *r.success;
        break;
      }
      case SolverKind::Amp: {
        const EnsembleSpec spec = EnsembleSpec::dense(n, rec.m);
        const DenseMeasurementMatrix F = gen_dense_matrix(spec, rng);
        const SignalVector x0 = gen_signal(n, rho, rng);
        const MeasurementVector y = measure(F, x0);
        AmpConfig amp;
        amp.max_iters = cfg.resolved_max_iters();
        amp.convergence_tol = cfg.convergence_tol;
        const RecoveryResult r = run_amp(F, y.values, amp, &x0.values, cfg.success_tol);
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.mse = *r.mse_vs_truth;
        rec.success = *r.success;
        break;
      }
      case SolverKind::De: {
        EnsembleSpec::regular(n, rec.m, cfg.j, cfg.k);  // validate only
        const SignalVector x0 = gen_signal(n, rho, rng);
        const RecoveryResult r = run_de_trial(n, rec.m, cfg.j, cfg.k, x0.values, rng,
                                              cfg.resolved_max_iters(), cfg.convergence_tol,
                                              cfg.success_tol);
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.mse = *r.mse_vs_truth;
        rec.success = *r.success;
        break;
      }
    }
  } catch (const std::exception&) {
    // a numerically blown-up trial is a failed trial, not a failed sweep
    rec.iterations = 0;
    rec.converged = false;
    rec.mse = std::numeric_limits<double>::quiet_NaN();
    rec.success = false;
  }
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

SweepTable run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t points = cfg.n_list.size() * cfg.rho_grid.size();
  const std::size_t total = points * static_cast<std::size_t>(cfg.trials);

  SweepTable table;
  table.records.resize(total);

  int threads = cfg.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), total));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const std::size_t point = task / static_cast<std::size_t>(cfg.trials);
      const int trial = static_cast<int>(task % static_cast<std::size_t>(cfg.trials));
      const int n = cfg.n_list[point / cfg.rho_grid.size()];
      const double rho = cfg.rho_grid[point % cfg.rho_grid.size()];
      table.records[task] = run_one_trial(cfg, n, rho, trial);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads) - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // per-(n, rho) aggregates in grid order; contents do not depend on the
  // completion order above
  for (std::size_t p = 0; p < points; ++p) {
    AggregateRow row;
    row.solver = cfg.solver;
    row.n = cfg.n_list[p / cfg.rho_grid.size()];
    row.alpha = cfg.alpha;
    row.rho = cfg.rho_grid[p % cfg.rho_grid.size()];
    row.trials = cfg.trials;
    for (int t = 0; t < cfg.trials; ++t)
      if (table.records[p * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(t)].success)
        ++row.successes;
    row.p_success = static_cast<double>(row.successes) / static_cast<double>(row.trials);
    row.stderr_p = std::sqrt(row.p_success * (1.0 - row.p_success) / static_cast<double>(row.trials));
    table.aggregates.push_back(row);
  }
  return table;
}

SweepTable run_density_evolution(SweepConfig cfg) {
  cfg.solver = SolverKind::De;
  return run_sweep(cfg);
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_trials_csv(const SweepTable& table, const std::string& path) {
  if (table.records.empty()) throw std::invalid_argument("emit_trials_csv: empty table");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "solver,n,m,alpha,rho,j,k,trial,seed,iterations,converged,mse,success,wall_ms\n";
  for (const SweepRecord& r : table.records) {
    out << solver_name(r.solver) << ',' << r.n << ',' << r.m << ',' << fmt_double(r.alpha) << ','
        << fmt_double(r.rho) << ',' << r.j << ',' << r.k << ',' << r.trial << ',' << r.seed << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << fmt_double(r.mse) << ','
        << (r.success ? 1 : 0) << ',' << fmt_double(r.wall_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

void emit_aggregate_csv(const SweepTable& table, const std::string& path) {
  if (table.aggregates.empty()) throw std::invalid_argument("emit_aggregate_csv: empty table");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "solver,n,alpha,rho,trials,successes,p_success,stderr\n";
  for (const AggregateRow& r : table.aggregates) {
    out << solver_name(r.solver) << ',' << r.n << ',' << fmt_double(r.alpha) << ','
        << fmt_double(r.rho) << ',' << r.trials << ',' << r.successes << ','
        << fmt_double(r.p_success) << ',' << fmt_double(r.stderr_p) << '\n';
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

std::string aggregate_csv_path(const std::string& trials_path) {
  const auto dot = trials_path.find_last_of('.');
  const auto slash = trials_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return trials_path + "_agg.csv";
  return trials_path.substr(0, dot) + "_agg" + trials_path.substr(dot);
}

void emit_csv(const SweepTable& table, const std::string& path) {
  emit_trials_csv(table, path);
  emit_aggregate_csv(table, aggregate_csv_path(path));
}

std::vector<AggregateRow> load_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open aggregate csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "solver,n,alpha,rho,trials,successes,p_success,stderr")
    throw std::runtime_error("aggregate csv: bad header in " + path);
  std::vector<AggregateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    AggregateRow r;
    std::getline(ls, field, ',');
    if (field == "bp")
      r.solver = SolverKind::Bp;
    else if (field == "amp")
      r.solver = SolverKind::Amp;
    else if (field == "de")
      r.solver = SolverKind::De;
    else
      throw std::runtime_error("aggregate csv: unknown solver '" + field + "'");
    auto next_field = [&]() {
      if (!std::getline(ls, field, ',')) throw std::runtime_error("aggregate csv: short row");
      return field;
    };
    r.n = std::stoi(next_field());
    r.alpha = std::stod(next_field());
    r.rho = std::stod(next_field());
    r.trials = std::stoi(next_field());
    r.successes = std::stoi(next_field());
    r.p_success = std::stod(next_field());
    r.stderr_p = std::stod(next_field());
    rows.push_back(r);
  }
  return rows;
}

}  // namespace csbp
