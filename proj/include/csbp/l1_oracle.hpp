#pragma once
/*
 * Desk-scale ground truth for min ||x||_1 s.t. F x = y: exhaustive
 * basic-solution enumeration (n <= 16) plus a dual certificate from the
 * support equations F_S^T lambda = -sign(x_S).
 */

#include <Eigen/Dense>

#include <string>

namespace csbp {

/// Per-component consistency tolerance for F x = y in the enumeration.
inline constexpr double kOracleConsistencyTol = 1e-9;
/// Two basic solutions within this l1 gap but differing as vectors mark the
/// minimizer as non-unique.
inline constexpr double kOracleUniqueGap = 1e-9;
/// Entries below this magnitude are treated as off-support by the certificate.
inline constexpr double kCertificateSupportEps = 1e-8;

struct OracleResult {
  Eigen::VectorXd x_star;
  double l1_value = 0.0;
  bool unique = false;
  bool certificate_ok = false;
};

struct CertifyResult {
  bool ok = false;
  std::string reason;
};

/// Enumerates all column subsets of size <= m, solves each subsystem with a
/// rank-revealing QR, keeps the exactly consistent solutions and returns the
/// minimum-l1 one.  Requires n <= 16 and full row rank.
OracleResult brute_force_l1(const Eigen::MatrixXd& F, const Eigen::VectorXd& y);

/// Checks the optimality conditions for x_hat: primal feasibility, support
/// stationarity (F^T lambda)_i = -sign(x_hat_i), and |F^T lambda| <= 1 off
/// support, with lambda = -F_S (F_S^T F_S)^{-1} sign(x_S).
CertifyResult certify_l1_optimality(const Eigen::MatrixXd& F, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& x_hat, double tol = 1e-6);

}  // namespace csbp
