#pragma once
/*
 * Macroscopic fixed-point recursion for the dense-limit solver.  Tracks the
 * overlap m = <x0 xhat>, self-overlap Q = <xhat^2> and curvature scale C;
 * the estimate error is E = Q - 2m + Q0.  The effective field is
 * B = (alpha/C) x0 + (sqrt(alpha E)/C) z with threshold scale A = alpha/C,
 * so the C condition <d f(B;A)/dB> = C reduces to
 * P(|alpha x0 + sqrt(alpha E) z| > C) = alpha, a scalar root-find in C.
 */

#include <vector>

namespace csbp {

/// Macroscopic state.  q0 equals rho for the unit-variance Bernoulli-
/// Gaussian signal; mse is kept equal to q - 2m + q0 (clipped at 0).
struct MacroState {
  double m = 0.0;
  double q = 0.0;
  double c = 1.0;
  double rho = 0.0;
  double alpha = 0.5;
  double q0 = 0.0;
  double mse = 0.0;
};

struct QuadratureSpec {
  int nodes = 201;               // Gauss-Legendre nodes for the signal average
  double cutoff_sigmas = 10.0;   // integration window half-width
  double fixed_point_tol = 1e-12;  // relative stall tolerance for the recursion
  int max_fixed_point_iters = 10000;

  void validate() const;
};

/// How the scalar C is refreshed inside one update.
///  - ExactRoot: solve the self-consistency condition at the current error.
///  - Lagged: evaluate the field with the state's carried C and refresh it
///    from the resulting activity, mirroring the dense solver's schedule.
enum class CScheme { ExactRoot, Lagged };

/// Error level treated as recovered / as a stalled fixed point when
/// classifying a trajectory.
inline constexpr double kSeRecoveredMse = 1e-10;
inline constexpr double kSeStalledMse = 1e-6;

/// Unique C > 0 with P(|alpha x0 + sqrt(alpha mse) z| > C) = alpha, found by
/// bisection on complementary-error-function tail masses.  Returns +infinity
/// when no root exists (mse = 0 with rho <= alpha: the perfectly recovered,
/// absorbing case).
double solve_c(double mse, double rho, double alpha);

/// Start of the macroscopic recursion: m = q = 0, so mse = q0 = rho.
MacroState se_initial_state(double alpha, double rho);

/// One update of (m, Q, C).  The point-mass signal component is handled in
/// closed form; the Gaussian component is averaged by quadrature over x0
/// with closed-form soft-threshold moments over z.
MacroState se_update(const MacroState& s, const QuadratureSpec& quad,
                     CScheme scheme = CScheme::ExactRoot);

/// mse after each of the first `iters` updates from the initial state.
std::vector<double> se_mse_trajectory(double alpha, double rho, int iters,
                                      const QuadratureSpec& quad,
                                      CScheme scheme = CScheme::ExactRoot);

struct SeClassification {
  bool recovered = false;
  double final_mse = 0.0;
  int iters = 0;
};

/// Runs the recursion from the initial state until the error drops below
/// kSeRecoveredMse, stalls above kSeStalledMse, or the iteration cap.
SeClassification classify_recovery(double alpha, double rho, const QuadratureSpec& quad);

/// Critical density at measurement rate alpha: bisects rho between the
/// recovering and stalling basins of the recursion.
double find_threshold(double alpha, const QuadratureSpec& quad = {}, double bisect_tol = 1e-4);

/// Moments of the unit soft threshold under W ~ N(mu, sigma^2):
/// active = P(|W| > 1), mean = E[eta(W)], second = E[eta(W)^2] with
/// eta(w) = sign(w) max(|w| - 1, 0).  sigma = 0 degenerates to the point
/// evaluation.  Exposed for the quadrature cross-checks.
struct SoftThresholdMoments {
  double active = 0.0;
  double mean = 0.0;
  double second = 0.0;
};
SoftThresholdMoments soft_threshold_gauss_moments(double mu, double sigma);

/// Nodes/weights for integrating f against the standard normal density over
/// [-cutoff, cutoff]: integral f(x) phi(x) dx ~= sum w_t f(x_t).
struct GaussianQuadrature {
  std::vector<double> x, w;
  explicit GaussianQuadrature(const QuadratureSpec& spec);
};

}  // namespace csbp
