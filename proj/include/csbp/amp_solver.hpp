#pragma once
/*
 * Dense-matrix limit of the edge-message solver: O(mn)-per-sweep iteration
 * on the residual z = y - D and field B, with scalar curvature A = alpha/C
 * tuned by the mean soft-threshold derivative C.  The residual update keeps
 * the previous sweep's memory term (deriv_avg_prev / C_prev) * z.
 */

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "csbp/instance.hpp"
#include "csbp/recovery.hpp"

namespace csbp {

struct AmpConfig {
  int max_iters = 10000;
  double convergence_tol = 1e-10;  // on max |delta x_hat| between sweeps
  double c_floor = 1e-12;          // clamp floor for the scalar C
  double c_init = 1.0;
  double damping_c = 0.0;          // mixes old into new C

  void validate() const;
};

struct AmpState {
  Eigen::VectorXd x_hat;
  Eigen::VectorXd z;        // residual, z_mu = y_mu - D_mu
  Eigen::VectorXd b_field;  // per-site field B_i
  double c_scalar = 1.0;
  double a_scalar = 0.0;       // alpha / c_scalar
  double deriv_avg_prev = 0.0; // raw mean threshold derivative at the last field
  double c_build_prev = 1.0;   // the C that scaled the last field
  int iter = 0;

  /// Standard start: x_hat = 0, z = y, C = c_init, memory term 0.
  static AmpState init(const DenseMeasurementMatrix& F, const Eigen::VectorXd& y,
                       const AmpConfig& cfg);
};

/// One full update in fixed order: residual (memory coefficient
/// deriv_avg_prev / c_build_prev, both about the previous field), field and
/// threshold with the carried scalars, then the scalar refresh
/// C <- max(mean deriv, c_floor), A <- alpha/C.  Returns the operation tally.
std::uint64_t amp_sweep(AmpState& state, const DenseMeasurementMatrix& F,
                        const Eigen::VectorXd& y, const AmpConfig& cfg);

/// Iterates amp_sweep until the estimate stabilizes or max_iters.  When
/// truth and mse_trace are both given, appends the per-sweep mean squared
/// error against truth.
RecoveryResult run_amp(const DenseMeasurementMatrix& F, const Eigen::VectorXd& y,
                       const AmpConfig& cfg = {}, const Eigen::VectorXd* truth = nullptr,
                       double success_tol = kDefaultSuccessTol,
                       std::vector<double>* mse_trace = nullptr);

}  // namespace csbp
