#pragma once
// Scalar soft-thresholding nonlinearity shared by all solvers.

#include <cmath>
#include <stdexcept>

namespace csbp {

/// Curvature/field pair fed to the soft threshold: a is the (positive)
/// quadratic coefficient, b the linear field.
struct ThresholdPair {
  double a;
  double b;

  ThresholdPair(double a_in, double b_in) : a(a_in), b(b_in) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw std::invalid_argument("ThresholdPair: need finite b and a > 0");
  }
};

/// Soft threshold with unit dead zone: 0 for |b| <= 1, (b - sign(b)) / a
/// outside.  Odd in b.  The boundary |b| == 1 maps to 0 (open step).
inline double soft_threshold(double b, double a) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("soft_threshold: need finite b and a > 0");
  if (b > 1.0) return (b - 1.0) / a;
  if (b < -1.0) return (b + 1.0) / a;
  return 0.0;
}

/// Almost-everywhere derivative of soft_threshold in b: 1/a outside the
/// dead zone, 0 inside and on the boundary.
inline double soft_threshold_deriv(double b, double a) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("soft_threshold_deriv: need finite b and a > 0");
  return (b > 1.0 || b < -1.0) ? 1.0 / a : 0.0;
}

inline double soft_threshold(const ThresholdPair& p) { return soft_threshold(p.b, p.a); }
inline double soft_threshold_deriv(const ThresholdPair& p) { return soft_threshold_deriv(p.b, p.a); }

}  // namespace csbp
