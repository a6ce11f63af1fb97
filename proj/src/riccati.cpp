#include "spreadopt/riccati.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace spreadopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_time(const RiccatiSpec& spec, double t) {
  if (!(t >= 0.0)) {
    throw DomainError("time must be >= 0, got " + std::to_string(t));
  }
  if (t >= spec.t_esc) {
    throw EscapeTimeExceeded("t = " + std::to_string(t) +
                             " reaches the escape time t_esc = " +
                             std::to_string(spec.t_esc));
  }
}

// log(cosh(x) + r sinh(x)) for x >= 0, r > 0, stable across scales: the
// naive form overflows past x ~ 710 and loses precision near x = 0.
double log_cosh_sinh(double x, double r) {
  if (x > 20.0) {
    // cosh, sinh -> e^x/2 within 1e-17 relative; split off the growth.
    return x + std::log(0.5 * (1.0 + r) + 0.5 * (1.0 - r) * std::exp(-2.0 * x));
  }
  const double s = std::sinh(0.5 * x);
  return std::log1p(2.0 * s * s + r * std::sinh(x));
}

}  // namespace

RiccatiSpec make_riccati_spec(double ab, double a2, double b2, double xi) {
  if (!(ab < 0.0)) {
    throw DomainError("a.b must be < 0, got " + std::to_string(ab));
  }
  if (!(a2 > 0.0) || !(b2 > 0.0)) {
    throw DomainError("|a|^2 and |b|^2 must be > 0");
  }
  if (!(xi != 0.0) || std::isnan(xi)) {
    throw DomainError("xi must be nonzero");
  }
  RiccatiSpec s;
  s.ab = ab;
  s.a2 = a2;
  s.b2 = b2;
  s.xi = xi;
  s.disc = ab * ab - xi * a2 * b2;
  if (std::abs(s.disc) <= kDiscBand * ab * ab) {
    s.regime = DiscRegime::zero;
  } else {
    s.regime = s.disc > 0.0 ? DiscRegime::positive : DiscRegime::negative;
  }
  if (s.regime == DiscRegime::negative) {
    const double omega = std::sqrt(-s.disc);
    s.t_esc = (std::numbers::pi / 2 + std::atan(-ab / omega)) / omega;
  } else {
    s.t_esc = kInf;
  }
  return s;
}

double riccati_h(const RiccatiSpec& spec, double t) {
  check_time(spec, t);
  const double m = -spec.ab;  // > 0
  switch (spec.regime) {
    case DiscRegime::positive: {
      const double s = std::sqrt(spec.disc);
      const double th = std::tanh(s * t);
      // tanh ratio instead of the textbook coth form: finite at t = 0, and
      // the denominator s + m*tanh >= s > 0 never vanishes.
      return spec.xi * spec.a2 * th / (s + m * th);
    }
    case DiscRegime::zero:
      return spec.xi * spec.a2 * t / (1.0 + m * t);
    case DiscRegime::negative: {
      const double omega = std::sqrt(-spec.disc);
      const double wt = omega * t;
      if (wt <= 0.25 * std::numbers::pi) {
        const double tn = std::tan(wt);
        return spec.xi * spec.a2 * tn / (omega + m * tn);
      }
      // Phase form (m + omega tan(wt - A))/b2 with A = atan(m/omega); exact
      // by omega^2 + m^2 = xi a2 b2, and free of the removable tan pole at
      // wt = pi/2.
      const double A = std::atan2(m, omega);
      return (m + omega * std::tan(wt - A)) / spec.b2;
    }
  }
  return 0.0;  // unreachable
}

double riccati_g(const RiccatiSpec& spec, double t) {
  check_time(spec, t);
  // g(0) == 0 exactly in every regime; the phase form below leaves an
  // O(eps) residue at t == 0 otherwise.
  if (t == 0.0) return 0.0;
  const double m = -spec.ab;
  switch (spec.regime) {
    case DiscRegime::positive: {
      const double s = std::sqrt(spec.disc);
      return 0.5 * m * t - 0.5 * log_cosh_sinh(s * t, m / s);
    }
    case DiscRegime::zero:
      return 0.5 * m * t - 0.5 * std::log1p(m * t);
    case DiscRegime::negative: {
      // cos(wt) + (m/omega) sin(wt) == R cos(wt - A), R = hypot(m,omega)/omega;
      // the phase form stays accurate as the argument approaches its root at
      // t_esc, where the direct sum cancels catastrophically.
      const double omega = std::sqrt(-spec.disc);
      const double A = std::atan2(m, omega);
      const double interior = std::cos(omega * t - A);
      if (!(interior > 0.0)) {
        throw DomainError("log argument non-positive at t = " +
                          std::to_string(t) + "; inconsistent escape time");
      }
      const double log_r = std::log(std::hypot(m, omega) / omega);
      return 0.5 * m * t - 0.5 * (log_r + std::log(interior));
    }
  }
  return 0.0;  // unreachable
}

double riccati_h_limit(const RiccatiSpec& spec) {
  if (spec.regime == DiscRegime::negative) {
    throw DomainError("h has no long-run limit when the discriminant is negative");
  }
  const double s =
      spec.regime == DiscRegime::zero ? 0.0 : std::sqrt(spec.disc);
  return spec.xi * spec.a2 / (s - spec.ab);
}

}  // namespace spreadopt
