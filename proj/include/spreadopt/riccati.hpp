#pragma once

#include "spreadopt/errors.hpp"

namespace spreadopt {

/// Discriminant classification band, relative to (a.b)^2: the zero branch is
/// the common limit of the other two, so near-zero discriminants are routed
/// there instead of suffering catastrophic cancellation in coth/tan forms.
inline constexpr double kDiscBand = 1e-12;

enum class DiscRegime { positive, zero, negative };

/// Coefficients of the scalar Riccati initial-value problem
///
///   h'(t) = 2 (a.b) h(t) + b2 h(t)^2 + xi a2,   h(0) = 0,
///
/// together with its discriminant classification and escape time. The
/// standing assumptions are a.b < 0, a2 > 0, b2 > 0, xi != 0.
struct RiccatiSpec {
  double ab = 0.0;    // a.b
  double a2 = 0.0;    // |a|^2
  double b2 = 0.0;    // |b|^2
  double xi = 0.0;    // constant-term weight
  double disc = 0.0;  // (a.b)^2 - xi a2 b2
  DiscRegime regime = DiscRegime::zero;
  double t_esc = 0.0;  // +infinity unless regime == negative
};

/// Validates the standing assumptions, classifies the discriminant and
/// computes the escape time (1/sqrt(-disc)) (pi/2 + arctan(-a.b/sqrt(-disc)))
/// for the negative regime. Throws DomainError on invalid coefficients.
RiccatiSpec make_riccati_spec(double ab, double a2, double b2, double xi);

/// Closed-form solution h(t). Branches on the regime; every branch evaluates
/// h(0) = 0 exactly. Requires 0 <= t, and t < t_esc in the negative regime
/// (EscapeTimeExceeded otherwise).
double riccati_h(const RiccatiSpec& spec, double t);

/// Antiderivative g(t) = integral of b2/2 * h over [0, t]; the scalar
/// companion appearing in the exp(g + h z^2/2) ansatz. Same domain as
/// riccati_h. Throws DomainError should the interior log argument fail to be
/// positive (impossible for t < t_esc; asserted, never clamped).
double riccati_g(const RiccatiSpec& spec, double t);

/// Long-run limit of h for disc >= 0: xi a2 / (sqrt(disc) - a.b).
/// DomainError in the negative regime (h escapes instead of converging).
double riccati_h_limit(const RiccatiSpec& spec);

}  // namespace spreadopt
