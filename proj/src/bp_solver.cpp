#include "csbp/bp_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "csbp/kernel.hpp"

namespace csbp {

void BpConfig::validate() const {
  if (max_iters <= 0) throw std::invalid_argument("BpConfig: max_iters must be positive");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("BpConfig: convergence_tol must be >= 0");
  if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("BpConfig: damping must lie in [0, 1)");
  if (!(epsilon_c > 0.0)) throw std::invalid_argument("BpConfig: epsilon_c must be positive");
  if (!(init_c > 0.0)) throw std::invalid_argument("BpConfig: init_c must be positive");
}

EdgeMessageState EdgeMessageState::init(int edge_count, double init_c) {
  EdgeMessageState st;
  const auto e = static_cast<std::size_t>(edge_count);
  st.a_msg.assign(e, 0.0);
  st.b_msg.assign(e, 0.0);
  st.c_msg.assign(e, init_c);
  st.d_msg.assign(e, 0.0);
  return st;
}

// Exclusive sums over a neighborhood are computed as prefix + suffix rather
// than total-minus-term: no cancellation when a single term dominates (C at
// the clamp floor makes terms ~1e12).

std::uint64_t update_variable_to_check(EdgeMessageState& state, const SparseMeasurementMatrix& F,
                                       const Eigen::VectorXd& y, const BpConfig& cfg) {
  if (F.min_column_degree() < 2)
    throw std::domain_error("update_variable_to_check: a column has degree < 2, cavity sum is empty");
  if (y.size() != F.m()) throw std::invalid_argument("update_variable_to_check: y length != rows");

  const int n = F.n();
  const double gamma = cfg.damping;
  std::uint64_t ops = 0;
  std::vector<double> ta(static_cast<std::size_t>(F.max_degree()));
  std::vector<double> tb(ta.size()), pa(ta.size()), pb(ta.size());

  for (int i = 0; i < n; ++i) {
    const auto ids = F.column_edges(i);
    const int deg = static_cast<int>(ids.size());
    double acc_a = 0.0, acc_b = 0.0;
    for (int t = 0; t < deg; ++t) {
      const int e = ids[static_cast<std::size_t>(t)];
      const Edge& ed = F.edge(e);
      const double ratio = ed.value / state.c_msg[static_cast<std::size_t>(e)];
      ta[static_cast<std::size_t>(t)] = ed.value * ratio;
      tb[static_cast<std::size_t>(t)] = ratio * (y[ed.row] - state.d_msg[static_cast<std::size_t>(e)]);
      pa[static_cast<std::size_t>(t)] = acc_a;
      pb[static_cast<std::size_t>(t)] = acc_b;
      acc_a += ta[static_cast<std::size_t>(t)];
      acc_b += tb[static_cast<std::size_t>(t)];
    }
    acc_a = 0.0;
    acc_b = 0.0;
    for (int t = deg - 1; t >= 0; --t) {
      const int e = ids[static_cast<std::size_t>(t)];
      const double a_new = pa[static_cast<std::size_t>(t)] + acc_a;
      const double b_new = pb[static_cast<std::size_t>(t)] + acc_b;
      state.a_msg[static_cast<std::size_t>(e)] = a_new;
      state.b_msg[static_cast<std::size_t>(e)] =
          gamma == 0.0 ? b_new : (1.0 - gamma) * b_new + gamma * state.b_msg[static_cast<std::size_t>(e)];
      acc_a += ta[static_cast<std::size_t>(t)];
      acc_b += tb[static_cast<std::size_t>(t)];
    }
    ops += static_cast<std::uint64_t>(deg) * 10u;
  }
  return ops;
}

std::uint64_t update_check_to_variable(EdgeMessageState& state, const SparseMeasurementMatrix& F,
                                       const BpConfig& cfg) {
  const int m = F.m();
  const double gamma = cfg.damping;
  std::uint64_t ops = 0;
  std::vector<double> tc(static_cast<std::size_t>(F.max_degree()));
  std::vector<double> td(tc.size()), pc(tc.size()), pd(tc.size());

  for (int mu = 0; mu < m; ++mu) {
    const auto ids = F.row_edges(mu);
    const int deg = static_cast<int>(ids.size());
    double acc_c = 0.0, acc_d = 0.0;
    for (int t = 0; t < deg; ++t) {
      const int e = ids[static_cast<std::size_t>(t)];
      const Edge& ed = F.edge(e);
      const double a = state.a_msg[static_cast<std::size_t>(e)];
      const double b = state.b_msg[static_cast<std::size_t>(e)];
      tc[static_cast<std::size_t>(t)] = ed.value * ed.value * soft_threshold_deriv(b, a);
      td[static_cast<std::size_t>(t)] = ed.value * soft_threshold(b, a);
      pc[static_cast<std::size_t>(t)] = acc_c;
      pd[static_cast<std::size_t>(t)] = acc_d;
      acc_c += tc[static_cast<std::size_t>(t)];
      acc_d += td[static_cast<std::size_t>(t)];
    }
    acc_c = 0.0;
    acc_d = 0.0;
    for (int t = deg - 1; t >= 0; --t) {
      const int e = ids[static_cast<std::size_t>(t)];
      const double c_new = pc[static_cast<std::size_t>(t)] + acc_c;
      const double d_new = pd[static_cast<std::size_t>(t)] + acc_d;
      state.c_msg[static_cast<std::size_t>(e)] = std::max(c_new, cfg.epsilon_c);
      state.d_msg[static_cast<std::size_t>(e)] =
          gamma == 0.0 ? d_new : (1.0 - gamma) * d_new + gamma * state.d_msg[static_cast<std::size_t>(e)];
      acc_c += tc[static_cast<std::size_t>(t)];
      acc_d += td[static_cast<std::size_t>(t)];
    }
    ops += static_cast<std::uint64_t>(deg) * 12u;
  }
  return ops;
}

RecoveryResult finalize(const EdgeMessageState& state, const SparseMeasurementMatrix& F,
                        const Eigen::VectorXd& y) {
  const int n = F.n();
  RecoveryResult out;
  out.x_hat.resize(n);
  std::uint64_t ops = 0;

  for (int i = 0; i < n; ++i) {
    double a_full = 0.0, b_full = 0.0;
    for (int e : F.column_edges(i)) {
      const Edge& ed = F.edge(e);
      const double ratio = ed.value / state.c_msg[static_cast<std::size_t>(e)];
      a_full += ed.value * ratio;
      b_full += ratio * (y[ed.row] - state.d_msg[static_cast<std::size_t>(e)]);
    }
    out.x_hat[i] = a_full > 0.0 ? soft_threshold(b_full, a_full) : 0.0;
    ops += static_cast<std::uint64_t>(F.column_degree(i)) * 6u + 2u;
  }

  Eigen::VectorXd r = y;
  for (const Edge& e : F.edges()) r[e.row] -= e.value * out.x_hat[e.col];
  ops += static_cast<std::uint64_t>(F.edge_count()) * 2u;
  out.residual_inf = r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  out.ops = ops;
  return out;
}

RecoveryResult run_bp(const SparseMeasurementMatrix& F, const Eigen::VectorXd& y,
                      const BpConfig& cfg, const Eigen::VectorXd* truth, double success_tol) {
  cfg.validate();
  if (y.size() != F.m()) throw std::invalid_argument("run_bp: y length != matrix rows");
  if (truth && truth->size() != F.n()) throw std::invalid_argument("run_bp: truth length != matrix columns");

  EdgeMessageState state = EdgeMessageState::init(F.edge_count(), cfg.init_c);
  Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(F.n());
  RecoveryResult result;
  std::uint64_t ops = 0;
  bool converged = false;
  int sweeps = 0;
  const bool y_zero = y.size() == 0 || y.lpNorm<Eigen::Infinity>() == 0.0;

  // numeric blowup (messages overflowing to inf under extreme clamping) is
  // reported as non-convergence with the last finite estimate
  for (int it = 1; it <= cfg.max_iters; ++it) {
    try {
      ops += update_variable_to_check(state, F, y, cfg);
      ops += update_check_to_variable(state, F, cfg);
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
    // an exactly-zero estimate against nonzero measurements is the all-dead
    // clamped state the epsilon_c floor exists to escape, not a fixed point
    const bool dead_state = !y_zero && result.x_hat.lpNorm<Eigen::Infinity>() == 0.0;
    if (delta < cfg.convergence_tol && !dead_state) {
      converged = true;
      break;
    }
  }

  result.iterations = sweeps;
  result.converged = converged;
  result.ops = ops;
  {
    Eigen::VectorXd r = y;
    for (const Edge& e : F.edges()) r[e.row] -= e.value * result.x_hat[e.col];
    result.residual_inf = r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  }
  if (truth) {
    const double mse = (result.x_hat - *truth).squaredNorm() / static_cast<double>(F.n());
    result.mse_vs_truth = mse;
    result.success = mse < success_tol;
  }
  return result;
}

}  // namespace csbp
