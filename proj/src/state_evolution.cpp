/*
 * Macroscopic recursion and critical-density scan for the dense-limit
 * solver.  The signal average splits into the point mass at zero (closed
 * form) and the Gaussian component (Gauss-Legendre quadrature over x0,
 * closed-form soft-threshold moments over the field noise).
 */

#include "csbp/state_evolution.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace csbp {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438187;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
constexpr double kLaggedCFloor = 1e-12;

double normal_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }
double normal_tail(double t) { return 0.5 * std::erfc(t / kSqrt2); }  // P(Z > t)

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on the Legendre
// recurrence; cached per node count.
struct GlRule {
  std::vector<double> x, w;
};

const GlRule& legendre_rule(int n) {
  static std::mutex mu;
  static std::map<int, GlRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GlRule rule;
  rule.x.assign(static_cast<std::size_t>(n), 0.0);
  rule.w.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int d = 0; d < n; ++d) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * d + 1) * z * p1 - d * p2) / (d + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.x[static_cast<std::size_t>(i)] = -z;
    rule.x[static_cast<std::size_t>(n - 1 - i)] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.w[static_cast<std::size_t>(i)] = w;
    rule.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (nodes < 2) throw std::invalid_argument("QuadratureSpec: need at least 2 nodes");
  if (!(cutoff_sigmas > 0.0)) throw std::invalid_argument("QuadratureSpec: cutoff must be positive");
  if (!(fixed_point_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: fixed_point_tol must be positive");
  if (max_fixed_point_iters <= 0) throw std::invalid_argument("QuadratureSpec: iteration cap must be positive");
}

GaussianQuadrature::GaussianQuadrature(const QuadratureSpec& spec) {
  spec.validate();
  const GlRule& rule = legendre_rule(spec.nodes);
  const double cut = spec.cutoff_sigmas;
  x.resize(rule.x.size());
  w.resize(rule.w.size());
  for (std::size_t t = 0; t < rule.x.size(); ++t) {
    x[t] = cut * rule.x[t];
    w[t] = cut * rule.w[t] * normal_pdf(x[t]);
  }
}

SoftThresholdMoments soft_threshold_gauss_moments(double mu, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(mu) || !std::isfinite(sigma))
    throw std::invalid_argument("soft_threshold_gauss_moments: need finite mu and sigma >= 0");
  SoftThresholdMoments out;
  if (sigma == 0.0) {
    const double eta = mu > 1.0 ? mu - 1.0 : (mu < -1.0 ? mu + 1.0 : 0.0);
    out.active = (mu > 1.0 || mu < -1.0) ? 1.0 : 0.0;
    out.mean = eta;
    out.second = eta * eta;
    return out;
  }
  const double bp = (1.0 - mu) / sigma;  // W > 1 tail at (W - mu)/sigma > bp
  const double bm = (1.0 + mu) / sigma;  // W < -1 tail
  const double cp = normal_tail(bp), cm = normal_tail(bm);
  const double pp = normal_pdf(bp), pm = normal_pdf(bm);
  out.active = cp + cm;
  out.mean = (mu - 1.0) * cp + sigma * pp + (mu + 1.0) * cm - sigma * pm;
  out.second = (mu - 1.0) * (mu - 1.0) * cp + 2.0 * (mu - 1.0) * sigma * pp +
               sigma * sigma * (cp + bp * pp) + (mu + 1.0) * (mu + 1.0) * cm -
               2.0 * (mu + 1.0) * sigma * pm + sigma * sigma * (cm + bm * pm);
  return out;
}

double solve_c(double mse, double rho, double alpha) {
  if (mse < 0.0 && mse > -1e-12) mse = 0.0;
  if (!(mse >= 0.0)) throw std::invalid_argument("solve_c: mse must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("solve_c: alpha must lie in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("solve_c: rho must lie in [0, 1]");

  const double sd_zero = std::sqrt(alpha * mse);                // x0 = 0 component
  const double sd_gauss = std::sqrt(alpha * alpha + alpha * mse);  // Gaussian component
  // tail mass above C; strictly decreasing in C
  auto tail = [&](double c) {
    double t = rho * std::erfc(c / (sd_gauss * kSqrt2));
    if (mse > 0.0) t += (1.0 - rho) * std::erfc(c / (sd_zero * kSqrt2));
    return t;
  };

  const double sup = mse > 0.0 ? 1.0 : rho;  // limit as C -> 0+
  if (sup <= alpha) return std::numeric_limits<double>::infinity();

  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (tail(hi) >= alpha) {
    hi *= 2.0;
    if (++guard > 1200) return std::numeric_limits<double>::infinity();
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted at double precision
    if (tail(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

MacroState se_initial_state(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("se_initial_state: alpha must lie in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("se_initial_state: rho must lie in [0, 1]");
  MacroState s;
  s.m = 0.0;
  s.q = 0.0;
  s.c = 1.0;
  s.rho = rho;
  s.alpha = alpha;
  s.q0 = rho;
  s.mse = rho;
  return s;
}

namespace {

struct Moments {
  double m = 0.0, q = 0.0, active = 0.0;
};

// Averages over the signal prior at field scale a (B = a x0 + sigma z):
//   m      = rho E[x0 eta(B)] / a
//   q      = E[eta(B)^2] / a^2
//   active = P(|B| > 1)
//
// At small estimate error the scale a is huge and the moment functions have
// structure of width ~(1 + sigma)/a around x0 = 0 that a fixed node grid
// cannot see.  The Gaussian-signal average is therefore split at
// x0 = (1 + 10 sigma)/a: quadrature resolves the window, and beyond it the
// moments equal their affine asymptotes (eta(W) ~ W -/+ 1 up to e^-50 tail
// mass), which integrate in closed form.
Moments field_moments(double a, double sigma, double rho, const QuadratureSpec& spec) {
  Moments out;
  const SoftThresholdMoments at_zero = soft_threshold_gauss_moments(0.0, sigma);
  const GlRule& rule = legendre_rule(spec.nodes);
  const double cut = spec.cutoff_sigmas;
  const double x_split = (1.0 + 10.0 * sigma) / a;

  double m_int = 0.0, q_int = 0.0, act_int = 0.0;
  if (x_split >= cut) {
    // structure wider than the window: plain quadrature over [-cut, cut]
    for (std::size_t t = 0; t < rule.x.size(); ++t) {
      const double x0 = cut * rule.x[t];
      const double w = cut * rule.w[t] * normal_pdf(x0);
      const SoftThresholdMoments mom = soft_threshold_gauss_moments(a * x0, sigma);
      m_int += w * x0 * mom.mean;
      q_int += w * mom.second;
      act_int += w * mom.active;
    }
  } else {
    for (std::size_t t = 0; t < rule.x.size(); ++t) {
      const double x0 = x_split * rule.x[t];
      const double w = x_split * rule.w[t] * normal_pdf(x0);
      const SoftThresholdMoments mom = soft_threshold_gauss_moments(a * x0, sigma);
      m_int += w * x0 * mom.mean;
      q_int += w * mom.second;
      act_int += w * mom.active;
    }
    // |x0| > x_split: eta moments are affine, Gaussian tail moments exact
    const double i0 = normal_tail(x_split);
    const double i1 = normal_pdf(x_split);
    const double i2 = i0 + x_split * i1;
    m_int += 2.0 * (a * i2 - i1);
    q_int += 2.0 * (a * a * i2 - 2.0 * a * i1 + (1.0 + sigma * sigma) * i0);
    act_int += 2.0 * i0;
  }

  out.m = rho * m_int / a;
  out.q = ((1.0 - rho) * at_zero.second + rho * q_int) / (a * a);
  out.active = (1.0 - rho) * at_zero.active + rho * act_int;
  return out;
}

MacroState absorbed_state(const MacroState& s, double c) {
  MacroState out = s;
  out.m = s.q0;
  out.q = s.q0;
  out.c = c;
  out.mse = 0.0;
  return out;
}

double clipped_mse(double q, double m, double q0) {
  const double e = q - 2.0 * m + q0;
  return e < 0.0 ? 0.0 : e;
}

}  // namespace

MacroState se_update(const MacroState& s, const QuadratureSpec& quad, CScheme scheme) {
  quad.validate();
  const double e = s.mse < 0.0 ? 0.0 : s.mse;

  if (scheme == CScheme::ExactRoot) {
    const double c = solve_c(e, s.rho, s.alpha);
    if (std::isinf(c)) return absorbed_state(s, c);
    const double a = s.alpha / c;
    const double sigma = std::sqrt(s.alpha * e) / c;
    const Moments mom = field_moments(a, sigma, s.rho, quad);
    MacroState out = s;
    out.m = mom.m;
    out.q = mom.q;
    out.c = c;
    out.mse = clipped_mse(out.q, out.m, out.q0);
    return out;
  }

  // lagged: field built with the carried C, then C refreshed from the
  // resulting activity (mirrors the dense solver's scalar schedule)
  const double c_prev = s.c;
  const double a = s.alpha / c_prev;
  const double sigma = std::sqrt(s.alpha * e) / c_prev;
  const Moments mom = field_moments(a, sigma, s.rho, quad);
  MacroState out = s;
  out.m = mom.m;
  out.q = mom.q;
  out.c = std::max(mom.active / a, kLaggedCFloor);
  out.mse = clipped_mse(out.q, out.m, out.q0);
  return out;
}

std::vector<double> se_mse_trajectory(double alpha, double rho, int iters,
                                      const QuadratureSpec& quad, CScheme scheme) {
  if (iters < 0) throw std::invalid_argument("se_mse_trajectory: iters must be >= 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(iters));
  MacroState s = se_initial_state(alpha, rho);
  for (int t = 0; t < iters; ++t) {
    s = se_update(s, quad, scheme);
    out.push_back(s.mse);
  }
  return out;
}

SeClassification classify_recovery(double alpha, double rho, const QuadratureSpec& quad) {
  quad.validate();
  MacroState s = se_initial_state(alpha, rho);
  SeClassification cls;
  for (int it = 1; it <= quad.max_fixed_point_iters; ++it) {
    const double prev = s.mse;
    s = se_update(s, quad, CScheme::ExactRoot);
    cls.iters = it;
    cls.final_mse = s.mse;
    if (s.mse < kSeRecoveredMse) {
      cls.recovered = true;
      return cls;
    }
    // settled on a non-recovering fixed point
    if (s.mse > kSeStalledMse && std::abs(s.mse - prev) < quad.fixed_point_tol * s.mse) return cls;
  }
  cls.recovered = cls.final_mse < kSeRecoveredMse;
  return cls;
}

double find_threshold(double alpha, const QuadratureSpec& quad, double bisect_tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("find_threshold: alpha must lie in (0, 1)");
  if (!(bisect_tol > 0.0)) throw std::invalid_argument("find_threshold: bisect_tol must be positive");

  double lo = std::min(1e-4, alpha * 0.5);  // recovering side
  double hi = alpha * (1.0 - 1e-9);         // stalling side
  if (!classify_recovery(alpha, lo, quad).recovered)
    throw std::runtime_error("find_threshold: lower bracket does not recover");
  if (classify_recovery(alpha, hi, quad).recovered)
    throw std::runtime_error("find_threshold: upper bracket recovers");

  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (classify_recovery(alpha, mid, quad).recovered)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace csbp
