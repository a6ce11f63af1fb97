#include "spreadopt/ode.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace spreadopt {

namespace {

double riccati_rhs(const RiccatiSpec& s, double h) {
  return 2.0 * s.ab * h + s.b2 * h * h + s.xi * s.a2;
}

double rk4_step(const RiccatiSpec& s, double h, double dt) {
  const double k1 = riccati_rhs(s, h);
  const double k2 = riccati_rhs(s, h + 0.5 * dt * k1);
  const double k3 = riccati_rhs(s, h + 0.5 * dt * k2);
  const double k4 = riccati_rhs(s, h + dt * k3);
  return h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Classic adaptive Simpson with Richardson acceptance; eps halves per split.
double adaptive_simpson(const RiccatiSpec& s, double a, double fa, double b,
                        double fb, double m, double fm, double whole,
                        double eps, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = 0.5 * s.b2 * riccati_h(s, lm);
  const double frm = 0.5 * s.b2 * riccati_h(s, rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(s, a, fa, m, fm, lm, flm, left, 0.5 * eps,
                          depth - 1) +
         adaptive_simpson(s, m, fm, b, fb, rm, frm, right, 0.5 * eps,
                          depth - 1);
}

}  // namespace

RkTrajectory riccati_rk4(const RiccatiSpec& spec, double t_end,
                         const OdeSolveConfig& cfg) {
  if (!(t_end >= 0.0)) {
    throw DomainError("t_end must be >= 0, got " + std::to_string(t_end));
  }
  if (!(cfg.step > 0.0) || !(cfg.max_h > 0.0)) {
    throw DomainError("step and max_h must be > 0");
  }
  RkTrajectory out;
  const auto n_full = static_cast<std::size_t>(t_end / cfg.step);
  out.t.reserve(n_full + 2);
  out.h.reserve(n_full + 2);
  out.t.push_back(0.0);
  out.h.push_back(0.0);
  double h = 0.0;
  for (std::size_t i = 0; i < n_full + 1; ++i) {
    const double t0 = static_cast<double>(i) * cfg.step;
    const double t1 = i < n_full ? t0 + cfg.step : t_end;
    const double dt = t1 - t0;
    if (!(dt > 0.0)) break;  // t_end was an exact multiple of step
    h = rk4_step(spec, h, dt);
    if (!std::isfinite(h) || std::abs(h) > cfg.max_h) {
      out.diverged = true;
      out.t_stop = t1;
      return out;
    }
    out.t.push_back(t1);
    out.h.push_back(h);
  }
  out.t_stop = out.t.back();
  return out;
}

double g_quadrature(const RiccatiSpec& spec, double t, double abs_tol) {
  if (!(t >= 0.0)) {
    throw DomainError("t must be >= 0, got " + std::to_string(t));
  }
  if (t >= spec.t_esc) {
    throw EscapeTimeExceeded("quadrature endpoint t = " + std::to_string(t) +
                             " reaches the escape time t_esc = " +
                             std::to_string(spec.t_esc));
  }
  if (!(abs_tol > 0.0)) {
    throw DomainError("abs_tol must be > 0");
  }
  if (t == 0.0) return 0.0;
  const double fa = 0.0;  // h(0) = 0
  const double fb = 0.5 * spec.b2 * riccati_h(spec, t);
  const double m = 0.5 * t;
  const double fm = 0.5 * spec.b2 * riccati_h(spec, m);
  const double whole = simpson(0.0, fa, t, fb, fm);
  return adaptive_simpson(spec, 0.0, fa, t, fb, m, fm, whole, abs_tol, 40);
}

}  // namespace spreadopt
