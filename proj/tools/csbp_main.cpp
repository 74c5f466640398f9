/*
 * csbp command line: instance generation, single solver runs, Monte-Carlo
 * phase-transition sweeps (bp / amp / connectivity-reshuffling), the
 * macroscopic threshold scan, and the small-instance l1 oracle.
 *
 * Exit codes: 0 success, 1 usage error, 2 runtime / I-O error.
 */

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "csbp/amp_solver.hpp"
#include "csbp/bp_solver.hpp"
#include "csbp/instance.hpp"
#include "csbp/l1_oracle.hpp"
#include "csbp/state_evolution.hpp"
#include "csbp/sweep.hpp"

namespace {

struct CommonOpts {
  int n = 1000;
  double alpha = 0.5;
  double rho = 0.1;
  int j = 10, k = 20;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  int max_iters = 0;
  double success_tol = 1e-8;
  double tol = 1e-10;
};

int derived_m(int n, double alpha) { return static_cast<int>(std::lround(alpha * n)); }

void print_result(const char* solver, int n, int m, double rho, const csbp::RecoveryResult& r) {
  std::printf("solver %s\n", solver);
  std::printf("n %d\nm %d\nrho %.17g\n", n, m, rho);
  std::printf("iterations %d\nconverged %d\n", r.iterations, r.converged ? 1 : 0);
  std::printf("residual_inf %.17g\n", r.residual_inf);
  if (r.mse_vs_truth) std::printf("mse %.17g\n", *r.mse_vs_truth);
  if (r.success) std::printf("success %d\n", *r.success ? 1 : 0);
}

csbp::Instance make_instance(const CommonOpts& c, bool sparse) {
  csbp::RandomStream rng(csbp::RngSeed{c.seed, c.stream});
  csbp::Instance inst;
  if (sparse) {
    const auto spec = csbp::EnsembleSpec::regular(c.n, derived_m(c.n, c.alpha), c.j, c.k);
    inst.matrix = csbp::gen_regular_sparse_matrix(spec, rng);
  } else {
    const auto spec = csbp::EnsembleSpec::dense(c.n, derived_m(c.n, c.alpha));
    inst.matrix = csbp::gen_dense_matrix(spec, rng);
  }
  inst.signal = csbp::gen_signal(c.n, c.rho, rng);
  if (inst.is_sparse())
    inst.measurements = csbp::measure(inst.sparse(), inst.signal);
  else
    inst.measurements = csbp::measure(inst.dense(), inst.signal);
  return inst;
}

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--n", c.n, "signal length");
  cmd->add_option("--alpha", c.alpha, "measurement rate m/n");
  cmd->add_option("--rho", c.rho, "signal density");
  cmd->add_option("--j", c.j, "non-zeros per column (sparse ensemble)");
  cmd->add_option("--k", c.k, "non-zeros per row (sparse ensemble)");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--stream", c.stream, "stream id");
  cmd->add_option("--max-iters", c.max_iters, "iteration cap (0 = solver default)");
  cmd->add_option("--success-tol", c.success_tol, "mse level counting as perfect recovery");
  cmd->add_option("--tol", c.tol, "convergence tolerance on max |delta x_hat|");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-matrix compressed sensing by message passing"};
  app.require_subcommand(1);

  // gen
  CommonOpts gen_opts;
  std::string gen_out;
  bool gen_dense_flag = false;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance file");
  add_common(gen_cmd, gen_opts);
  gen_cmd->add_flag("--dense", gen_dense_flag, "dense Gaussian ensemble (default: sparse regular)");
  gen_cmd->add_option("--out", gen_out, "output instance path")->required();

  // bp / amp
  CommonOpts bp_opts, amp_opts;
  std::string bp_in, amp_in;
  auto* bp_cmd = app.add_subcommand("bp", "run the sparse-graph solver on one instance");
  add_common(bp_cmd, bp_opts);
  bp_cmd->add_option("--in", bp_in, "instance file (generated on the fly when omitted)");
  auto* amp_cmd = app.add_subcommand("amp", "run the dense-limit solver on one instance");
  add_common(amp_cmd, amp_opts);
  amp_cmd->add_option("--in", amp_in, "instance file (generated on the fly when omitted)");

  // sweep / de
  auto add_sweep_options = [](CLI::App* cmd, csbp::SweepConfig& cfg, std::vector<double>& rho_list,
                              double& rho_min, double& rho_max, double& rho_step,
                              std::string& out, std::string& chart) {
    cmd->add_option("--n", cfg.n_list, "signal lengths (repeatable)")->required();
    cmd->add_option("--alpha", cfg.alpha, "measurement rate m/n");
    cmd->add_option("--rho", rho_list, "explicit rho grid points (repeatable)");
    cmd->add_option("--rho-min", rho_min, "rho grid start");
    cmd->add_option("--rho-max", rho_max, "rho grid end (inclusive)");
    cmd->add_option("--rho-step", rho_step, "rho grid step");
    cmd->add_option("--j", cfg.j, "non-zeros per column");
    cmd->add_option("--k", cfg.k, "non-zeros per row");
    cmd->add_option("--trials", cfg.trials, "trials per grid point");
    cmd->add_option("--seed", cfg.base_seed, "base seed");
    cmd->add_option("--max-iters", cfg.max_iters, "iteration cap (0 = solver default)");
    cmd->add_option("--success-tol", cfg.success_tol, "mse level counting as perfect recovery");
    cmd->add_option("--tol", cfg.convergence_tol, "convergence tolerance");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out", out, "per-trial CSV path (aggregates at <stem>_agg.csv)");
    cmd->add_option("--chart", chart, "SVG chart path");
  };

  csbp::SweepConfig sweep_cfg, de_cfg;
  std::vector<double> sweep_rho, de_rho;
  double sweep_rmin = -1, sweep_rmax = -1, sweep_rstep = 0, de_rmin = -1, de_rmax = -1, de_rstep = 0;
  std::string sweep_out, sweep_chart, de_out, de_chart, sweep_solver = "amp";
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo success-probability sweep");
  sweep_cmd->add_option("--solver", sweep_solver, "bp | amp | de")
      ->check(CLI::IsMember({"bp", "amp", "de"}));
  add_sweep_options(sweep_cmd, sweep_cfg, sweep_rho, sweep_rmin, sweep_rmax, sweep_rstep, sweep_out,
                    sweep_chart);
  auto* de_cmd = app.add_subcommand("de", "connectivity-reshuffling sweep");
  add_sweep_options(de_cmd, de_cfg, de_rho, de_rmin, de_rmax, de_rstep, de_out, de_chart);

  // se
  double se_alpha = 0.5, se_bisect_tol = 1e-4, se_rho = -1.0;
  int se_nodes = 201, se_iters = 100;
  std::string se_out, se_scheme = "exact";
  auto* se_cmd = app.add_subcommand("se", "macroscopic recursion: threshold or trajectory");
  se_cmd->add_option("--alpha", se_alpha, "measurement rate");
  se_cmd->add_option("--bisect-tol", se_bisect_tol, "threshold bisection tolerance");
  se_cmd->add_option("--nodes", se_nodes, "quadrature nodes");
  se_cmd->add_option("--rho", se_rho, "trajectory mode: run the recursion at this rho");
  se_cmd->add_option("--iters", se_iters, "trajectory length");
  se_cmd->add_option("--scheme", se_scheme, "C refresh: exact | lagged")
      ->check(CLI::IsMember({"exact", "lagged"}));
  se_cmd->add_option("--out", se_out, "trajectory CSV path");

  // oracle
  std::string oracle_in;
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force l1 minimizer + dual certificate");
  oracle_cmd->add_option("--in", oracle_in, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto resolve_rho_grid = [](csbp::SweepConfig& cfg, const std::vector<double>& rho_list,
                             double rmin, double rmax, double rstep) {
    if (!rho_list.empty()) {
      cfg.rho_grid = rho_list;
      return;
    }
    if (rmin >= 0 && rmax >= rmin && rstep > 0) {
      for (double r = rmin; r <= rmax + 1e-12; r += rstep) cfg.rho_grid.push_back(r);
      return;
    }
    throw CLI::ValidationError("rho grid", "give --rho values or --rho-min/--rho-max/--rho-step");
  };

  try {
    if (gen_cmd->parsed()) {
      const csbp::Instance inst = make_instance(gen_opts, !gen_dense_flag);
      csbp::save_instance(gen_out, inst);
      std::printf("wrote %s (%s n=%d m=%d rho=%g)\n", gen_out.c_str(),
                  inst.is_sparse() ? "sparse" : "dense", gen_opts.n,
                  derived_m(gen_opts.n, gen_opts.alpha), gen_opts.rho);
    } else if (bp_cmd->parsed()) {
      csbp::Instance inst =
          bp_in.empty() ? make_instance(bp_opts, true) : csbp::load_instance(bp_in);
      if (!inst.is_sparse()) throw CLI::ValidationError("bp", "needs a sparse instance");
      csbp::BpConfig cfg;
      if (bp_opts.max_iters > 0) cfg.max_iters = bp_opts.max_iters;
      cfg.convergence_tol = bp_opts.tol;
      const auto r = csbp::run_bp(inst.sparse(), inst.measurements.values, cfg,
                                  &inst.signal.values, bp_opts.success_tol);
      print_result("bp", inst.sparse().n(), inst.sparse().m(), inst.signal.density, r);
    } else if (amp_cmd->parsed()) {
      csbp::Instance inst =
          amp_in.empty() ? make_instance(amp_opts, false) : csbp::load_instance(amp_in);
      if (inst.is_sparse()) throw CLI::ValidationError("amp", "needs a dense instance");
      csbp::AmpConfig cfg;
      if (amp_opts.max_iters > 0) cfg.max_iters = amp_opts.max_iters;
      cfg.convergence_tol = amp_opts.tol;
      const auto r = csbp::run_amp(inst.dense(), inst.measurements.values, cfg,
                                   &inst.signal.values, amp_opts.success_tol);
      print_result("amp", inst.dense().n(), inst.dense().m(), inst.signal.density, r);
    } else if (sweep_cmd->parsed() || de_cmd->parsed()) {
      csbp::SweepConfig& cfg = sweep_cmd->parsed() ? sweep_cfg : de_cfg;
      if (sweep_cmd->parsed()) {
        resolve_rho_grid(cfg, sweep_rho, sweep_rmin, sweep_rmax, sweep_rstep);
        cfg.solver = sweep_solver == "bp"    ? csbp::SolverKind::Bp
                     : sweep_solver == "amp" ? csbp::SolverKind::Amp
                                             : csbp::SolverKind::De;
      } else {
        resolve_rho_grid(cfg, de_rho, de_rmin, de_rmax, de_rstep);
        cfg.solver = csbp::SolverKind::De;
      }
      const std::string out = sweep_cmd->parsed() ? sweep_out : de_out;
      const std::string chart = sweep_cmd->parsed() ? sweep_chart : de_chart;
      const auto table = csbp::run_sweep(cfg);
      if (!out.empty()) csbp::emit_csv(table, out);
      if (!chart.empty()) csbp::emit_chart(table, chart);
      std::printf("solver,n,alpha,rho,trials,successes,p_success,stderr\n");
      for (const auto& a : table.aggregates)
        std::printf("%s,%d,%g,%g,%d,%d,%g,%g\n", csbp::solver_name(a.solver), a.n, a.alpha, a.rho,
                    a.trials, a.successes, a.p_success, a.stderr_p);
    } else if (se_cmd->parsed()) {
      csbp::QuadratureSpec quad;
      quad.nodes = se_nodes;
      const auto scheme =
          se_scheme == "lagged" ? csbp::CScheme::Lagged : csbp::CScheme::ExactRoot;
      if (se_rho >= 0.0) {
        const auto traj = csbp::se_mse_trajectory(se_alpha, se_rho, se_iters, quad, scheme);
        if (!se_out.empty()) {
          std::FILE* f = std::fopen(se_out.c_str(), "w");
          if (!f) throw std::runtime_error("cannot open " + se_out);
          std::fprintf(f, "iteration,mse\n");
          for (std::size_t t = 0; t < traj.size(); ++t)
            std::fprintf(f, "%zu,%.17g\n", t + 1, traj[t]);
          std::fclose(f);
        }
        std::printf("final_mse %.17g\n", traj.empty() ? se_rho : traj.back());
      } else {
        const auto t0 = std::chrono::steady_clock::now();
        const double rho_c = csbp::find_threshold(se_alpha, quad, se_bisect_tol);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("alpha %.17g\nrho_c %.17g\nseconds %.3f\n", se_alpha, rho_c, secs);
      }
    } else if (oracle_cmd->parsed()) {
      const csbp::Instance inst = csbp::load_instance(oracle_in);
      const Eigen::MatrixXd F =
          inst.is_sparse() ? inst.sparse().to_dense() : inst.dense().values;
      const auto o = csbp::brute_force_l1(F, inst.measurements.values);
      std::printf("l1_value %.17g\nunique %d\ncertificate_ok %d\n", o.l1_value, o.unique ? 1 : 0,
                  o.certificate_ok ? 1 : 0);
      for (int i = 0; i < o.x_star.size(); ++i) std::printf("x_star %d %.17g\n", i, o.x_star[i]);
      const double dist = (o.x_star - inst.signal.values).lpNorm<Eigen::Infinity>();
      std::printf("matches_signal %d\n", dist <= 1e-9 ? 1 : 0);
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
