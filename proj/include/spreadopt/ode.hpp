#pragma once

#include <vector>

#include "spreadopt/riccati.hpp"

namespace spreadopt {

struct OdeSolveConfig {
  double step = 1e-4;  // fixed RK4 step
  double max_h = 1e6;  // |h| beyond this counts as divergence
};

/// Fixed-step classical RK4 trajectory of the Riccati initial-value problem.
/// Deliberately independent of the closed forms in riccati.hpp: this is the
/// oracle they are tested against.
struct RkTrajectory {
  std::vector<double> t;  // nodes; t[0] = 0
  std::vector<double> h;  // values; h[0] = 0
  bool diverged = false;  // stopped early: |h| crossed max_h or went non-finite
  double t_stop = 0.0;    // time of the offending step when diverged,
                          // otherwise the final node (== t_end)
};

/// Integrates to t_end (or to divergence). Nodes advance by exactly cfg.step,
/// with one short final step to land on t_end. Divergence is an expected
/// outcome near the escape time, so it is reported, not thrown.
RkTrajectory riccati_rk4(const RiccatiSpec& spec, double t_end,
                         const OdeSolveConfig& cfg = {});

/// Adaptive-Simpson quadrature of g(t) = integral of b2/2 * h(s) ds over
/// [0, t], the substitution identity defining g. Absolute tolerance abs_tol.
/// Requires t < t_esc like riccati_h itself.
double g_quadrature(const RiccatiSpec& spec, double t, double abs_tol = 1e-9);

}  // namespace spreadopt
