#include "csbp/amp_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "csbp/kernel.hpp"

namespace csbp {

void AmpConfig::validate() const {
  if (max_iters <= 0) throw std::invalid_argument("AmpConfig: max_iters must be positive");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("AmpConfig: convergence_tol must be >= 0");
  if (!(c_floor > 0.0)) throw std::invalid_argument("AmpConfig: c_floor must be positive");
  if (!(c_init > 0.0)) throw std::invalid_argument("AmpConfig: c_init must be positive");
  if (!(damping_c >= 0.0 && damping_c < 1.0)) throw std::invalid_argument("AmpConfig: damping_c must lie in [0, 1)");
}

AmpState AmpState::init(const DenseMeasurementMatrix& F, const Eigen::VectorXd& y,
                        const AmpConfig& cfg) {
  cfg.validate();
  if (y.size() != F.m()) throw std::invalid_argument("AmpState::init: y length != matrix rows");
  AmpState s;
  s.x_hat = Eigen::VectorXd::Zero(F.n());
  s.z = y;
  s.b_field = Eigen::VectorXd::Zero(F.n());
  s.c_scalar = cfg.c_init;
  s.a_scalar = F.m() / (static_cast<double>(F.n()) * cfg.c_init);
  s.deriv_avg_prev = 0.0;
  s.c_build_prev = cfg.c_init;
  s.iter = 0;
  return s;
}

std::uint64_t amp_sweep(AmpState& s, const DenseMeasurementMatrix& F, const Eigen::VectorXd& y,
                        const AmpConfig& cfg) {
  const auto& M = F.values;
  const int n = F.n(), m = F.m();
  const double alpha = static_cast<double>(m) / static_cast<double>(n);
  const double c_cur = s.c_scalar;
  const double a_cur = s.a_scalar;

  // memory term: mean threshold derivative at the previous field over the C
  // that scaled that field; equals 1 once the scalars have settled
  const double memory_coeff = s.deriv_avg_prev / s.c_build_prev;
  s.z = y - M * s.x_hat + memory_coeff * s.z;
  s.b_field = (M.transpose() * s.z) / c_cur + (alpha / c_cur) * s.x_hat;

  double deriv_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double b = s.b_field[i];
    s.x_hat[i] = soft_threshold(b, a_cur);
    deriv_sum += soft_threshold_deriv(b, a_cur);
  }
  const double raw = deriv_sum / static_cast<double>(n);
  s.deriv_avg_prev = raw;
  s.c_build_prev = c_cur;
  const double mixed = cfg.damping_c == 0.0 ? raw : (1.0 - cfg.damping_c) * raw + cfg.damping_c * c_cur;
  s.c_scalar = std::max(mixed, cfg.c_floor);
  s.a_scalar = alpha / s.c_scalar;
  ++s.iter;

  return 4u * static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n) +
         8u * static_cast<std::uint64_t>(n) + 3u * static_cast<std::uint64_t>(m) + 8u;
}

RecoveryResult run_amp(const DenseMeasurementMatrix& F, const Eigen::VectorXd& y,
                       const AmpConfig& cfg, const Eigen::VectorXd* truth, double success_tol,
                       std::vector<double>* mse_trace) {
  cfg.validate();
  if (y.size() != F.m()) throw std::invalid_argument("run_amp: y length != matrix rows");
  if (truth && truth->size() != F.n()) throw std::invalid_argument("run_amp: truth length != matrix columns");

  AmpState s = AmpState::init(F, y, cfg);
  Eigen::VectorXd x_prev = s.x_hat;
  std::uint64_t ops = 0;
  bool converged = false;
  int sweeps = 0;
  const bool y_zero = y.size() == 0 || y.lpNorm<Eigen::Infinity>() == 0.0;

  // the iteration can blow up numerically at small n (the memory coefficient
  // exceeds 1 when the active fraction sits above alpha); that is reported as
  // non-convergence with the last finite estimate, never thrown
  for (int it = 1; it <= cfg.max_iters; ++it) {
    try {
      ops += amp_sweep(s, F, y, cfg);
    } catch (const std::invalid_argument&) {
      s.x_hat = x_prev;
      sweeps = it;
      break;
    }
    sweeps = it;
    if (!s.x_hat.allFinite() || !s.z.allFinite()) {
      s.x_hat = x_prev;
      break;
    }
    if (truth && mse_trace)
      mse_trace->push_back((s.x_hat - *truth).squaredNorm() / static_cast<double>(F.n()));
    const double delta = (s.x_hat - x_prev).lpNorm<Eigen::Infinity>();
    x_prev = s.x_hat;
    // an exactly-zero estimate against nonzero measurements is the all-dead
    // clamped state the c_floor exists to escape, not a fixed point
    const bool dead_state = !y_zero && s.x_hat.lpNorm<Eigen::Infinity>() == 0.0;
    if (delta < cfg.convergence_tol && !dead_state) {
      converged = true;
      break;
    }
  }

  RecoveryResult result;
  result.x_hat = s.x_hat;
  result.iterations = sweeps;
  result.converged = converged;
  result.residual_inf = (y - F.values * s.x_hat).lpNorm<Eigen::Infinity>();
  result.ops = ops;
  if (truth) {
    const double mse = (s.x_hat - *truth).squaredNorm() / static_cast<double>(F.n());
    result.mse_vs_truth = mse;
    result.success = mse < success_tol;
  }
  return result;
}

}  // namespace csbp
