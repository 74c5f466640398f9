#pragma once
/*
 * Edge-message solver on the sparse bipartite graph.  Each undirected edge
 * (i, mu) carries four parameters: the variable-to-check pair (A, B) of the
 * quadratic single-body objective A/2 x^2 - B x + |x|, and the
 * check-to-variable pair (C, D) of the multiplier-side objective.  Sweeps
 * are fully synchronous: all (A, B) from the previous (C, D), then all
 * (C, D) from the fresh (A, B) through the soft threshold.
 */

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "csbp/instance.hpp"
#include "csbp/recovery.hpp"

namespace csbp {

struct BpConfig {
  int max_iters = 1000;
  double convergence_tol = 1e-10;  // on max |delta x_hat| between sweeps
  double damping = 0.0;            // mixes old into new B and D messages
  double epsilon_c = 1e-12;        // clamp floor for check-to-variable curvature
  double init_c = 1.0;

  void validate() const;
};

/// Per-edge message storage, indexed by the matrix's edge ids.
struct EdgeMessageState {
  std::vector<double> a_msg, b_msg;  // variable -> check
  std::vector<double> c_msg, d_msg;  // check -> variable

  static EdgeMessageState init(int edge_count, double init_c);
};

/// Recomputes all (A, B) messages from the incoming (C, D), excluding each
/// edge's own check.  Requires every column degree >= 2 (the cavity sum is
/// empty otherwise) and c_msg above the clamp floor.  Returns the operation
/// tally for the sweep.
std::uint64_t update_variable_to_check(EdgeMessageState& state, const SparseMeasurementMatrix& F,
                                       const Eigen::VectorXd& y, const BpConfig& cfg);

/// Recomputes all (C, D) messages from the incoming (A, B) through the soft
/// threshold and its derivative; C is clamped to epsilon_c afterwards.
std::uint64_t update_check_to_variable(EdgeMessageState& state, const SparseMeasurementMatrix& F,
                                       const BpConfig& cfg);

/// Full (non-cavity) per-column sums -> estimate and residual.  iterations,
/// converged, mse and success are left for the caller to fill.
RecoveryResult finalize(const EdgeMessageState& state, const SparseMeasurementMatrix& F,
                        const Eigen::VectorXd& y);

/// Runs synchronous sweeps from the standard initialization (C = init_c,
/// D = 0, variable side first) until the estimate stabilizes or max_iters.
/// Non-convergence is reported in the result, not thrown.
RecoveryResult run_bp(const SparseMeasurementMatrix& F, const Eigen::VectorXd& y,
                      const BpConfig& cfg = {}, const Eigen::VectorXd* truth = nullptr,
                      double success_tol = kDefaultSuccessTol);

}  // namespace csbp
