#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace csbp {

/// Mean-squared-error level under which a trial counts as perfect recovery.
inline constexpr double kDefaultSuccessTol = 1e-8;

/// Outcome of a solver run.  mse_vs_truth and success are present only when
/// the caller supplied the original signal; success <=> mse below the
/// success tolerance.  ops is a deterministic arithmetic-operation tally
/// used by the cost-scaling tests.
struct RecoveryResult {
  Eigen::VectorXd x_hat;
  int iterations = 0;
  bool converged = false;
  double residual_inf = 0.0;  // ||y - F x_hat||_inf
  std::optional<double> mse_vs_truth;
  std::optional<bool> success;
  std::uint64_t ops = 0;
};

}  // namespace csbp
