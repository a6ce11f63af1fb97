#include "spreadopt/merton.hpp"

#include <cmath>
#include <string>

namespace spreadopt {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("gamma must lie in (0,1), got " + std::to_string(gamma));
  }
}

RiccatiSpec specialize_spec(const SpreadParams& s, double gamma) {
  return make_riccati_spec(-s.kappa / gamma,
                           dot(s.lambda, s.lambda) / (gamma * gamma),
                           s.sigma_z2, 1.0 - gamma);
}

double time_to_go(const MertonSolution& sol, double t) {
  if (!(t >= 0.0) || !(t <= sol.horizon)) {
    throw DomainError("t must lie in [0, horizon], got " + std::to_string(t));
  }
  return sol.horizon - t;
}

}  // namespace

double critical_horizon(const MarketParams& p, double gamma) {
  check_gamma(gamma);
  return specialize_spec(derive_spread(p), gamma).t_esc;
}

MertonSolution merton_specialize(const MarketParams& p, double gamma,
                                 double horizon) {
  check_gamma(gamma);
  if (!(horizon > 0.0)) {
    throw DomainError("horizon must be > 0, got " + std::to_string(horizon));
  }
  MertonSolution sol;
  sol.params = validate_market(p);
  sol.spread = derive_spread(p);
  sol.spec = specialize_spec(sol.spread, gamma);
  sol.gamma = gamma;
  sol.horizon = horizon;
  sol.t_n = sol.spec.t_esc;
  if (!(horizon < sol.t_n)) {
    throw IllPosedHorizon(gamma, sol.spread.gamma0, sol.t_n);
  }
  return sol;
}

double value_function_exponent(const MertonSolution& sol, double x, double z,
                               double t) {
  if (!(x > 0.0)) {
    throw NonPositiveWealth("wealth must be > 0, got " + std::to_string(x));
  }
  const double tau = time_to_go(sol, t);
  const double g = riccati_g(sol.spec, tau);
  const double h = riccati_h(sol.spec, tau);
  return (1.0 - sol.gamma) * std::log(x) +
         sol.gamma * (g + 0.5 * h * z * z);
}

double value_function(const MertonSolution& sol, double x, double z,
                      double t) {
  return std::expm1(value_function_exponent(sol, x, z, t)) /
         (1.0 - sol.gamma);
}

Vec2 optimal_weights(const MertonSolution& sol, double z, double t) {
  const double tau = time_to_go(sol, t);
  const double h = riccati_h(sol.spec, tau);
  const Vec2 myopic = solve_gram(sigma_matrix(sol.params),
                                 Vec2{sol.params.alpha1, sol.params.alpha2});
  const Vec2 w = (1.0 / sol.gamma) * myopic + h * Vec2{1.0, -sol.params.c};
  return z * w;
}

Vec2 mn_optimal_weights(const MarketParams& p, double gamma, double horizon,
                        double z, double t) {
  check_gamma(gamma);
  const WellPosednessReport wp = check_wellposedness(p);
  if (!wp.holds) {
    throw ConditionViolated(
        "market-neutral closed form requires the drift identity; residual = " +
        std::to_string(wp.residual));
  }
  if (!(t >= 0.0) || !(t <= horizon)) {
    throw DomainError("t must lie in [0, horizon], got " + std::to_string(t));
  }
  if (t == horizon) {
    throw TerminalTime(
        "market-neutral weights are defined on [0, T); at t = T use "
        "optimal_weights (the limits agree)");
  }
  const SpreadParams s = derive_spread(p);
  const double root_gamma = std::sqrt(gamma);
  const double coth =
      1.0 / std::tanh(s.kappa / root_gamma * (horizon - t));
  const double prefactor = (-s.kappa / s.sigma_z2) *
                           (1.0 + coth / root_gamma) /
                           (1.0 + root_gamma * coth);
  return (prefactor * z) * Vec2{1.0, -p.c};
}

}  // namespace spreadopt
