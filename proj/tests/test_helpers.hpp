#pragma once
// Shared oracles for the test suites: normal tail helpers, a bisection
// quantile, and independent straight-line recomputations of the message
// updates (kept free of the solver's prefix/suffix machinery so the cavity
// identities are checked by a second route).

#include <cmath>
#include <vector>

#include "csbp/bp_solver.hpp"
#include "csbp/instance.hpp"
#include "csbp/kernel.hpp"

namespace testutil {

inline double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }
inline double normal_tail(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

// z with P(Z > z) = p, by bisection
inline double normal_tail_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_tail(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct CavityExpect {
  std::vector<double> a, b, c, d;
};

// variable->check cavity sums, written as direct exclusion loops
inline CavityExpect straight_line_variable_update(const csbp::SparseMeasurementMatrix& F,
                                                  const Eigen::VectorXd& y,
                                                  const std::vector<double>& c_msg,
                                                  const std::vector<double>& d_msg) {
  CavityExpect out;
  out.a.assign(c_msg.size(), 0.0);
  out.b.assign(c_msg.size(), 0.0);
  for (int i = 0; i < F.n(); ++i) {
    for (int e : F.column_edges(i)) {
      double a_sum = 0.0, b_sum = 0.0;
      for (int e2 : F.column_edges(i)) {
        if (e2 == e) continue;
        const csbp::Edge& ed = F.edge(e2);
        a_sum += ed.value * ed.value / c_msg[static_cast<std::size_t>(e2)];
        b_sum += ed.value / c_msg[static_cast<std::size_t>(e2)] *
                 (y[ed.row] - d_msg[static_cast<std::size_t>(e2)]);
      }
      out.a[static_cast<std::size_t>(e)] = a_sum;
      out.b[static_cast<std::size_t>(e)] = b_sum;
    }
  }
  return out;
}

// check->variable cavity sums through the soft threshold (no clamping)
inline CavityExpect straight_line_check_update(const csbp::SparseMeasurementMatrix& F,
                                               const std::vector<double>& a_msg,
                                               const std::vector<double>& b_msg) {
  CavityExpect out;
  out.c.assign(a_msg.size(), 0.0);
  out.d.assign(a_msg.size(), 0.0);
  for (int mu = 0; mu < F.m(); ++mu) {
    for (int e : F.row_edges(mu)) {
      double c_sum = 0.0, d_sum = 0.0;
      for (int e2 : F.row_edges(mu)) {
        if (e2 == e) continue;
        const csbp::Edge& ed = F.edge(e2);
        const double a = a_msg[static_cast<std::size_t>(e2)];
        const double b = b_msg[static_cast<std::size_t>(e2)];
        c_sum += ed.value * ed.value * csbp::soft_threshold_deriv(b, a);
        d_sum += ed.value * csbp::soft_threshold(b, a);
      }
      out.c[static_cast<std::size_t>(e)] = c_sum;
      out.d[static_cast<std::size_t>(e)] = d_sum;
    }
  }
  return out;
}

inline bool close_rel(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

}  // namespace testutil
