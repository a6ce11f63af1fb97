#pragma once

#include "spreadopt/market.hpp"
#include "spreadopt/riccati.hpp"

namespace spreadopt {

/// Closed-form solution of the finite-horizon CRRA investment problem on the
/// spread market: value function v(x,z,t) = (x^{1-gamma} e^{gamma(g+h z^2/2)}
/// - 1)/(1-gamma) with (g, h) from the Riccati specialization
/// a.b = -kappa/gamma, |a|^2 = |lambda|^2/gamma^2, |b|^2 = sigma_z2,
/// xi = 1-gamma. Time arguments of g and h are time-to-go T - t.
struct MertonSolution {
  MarketParams params;
  SpreadParams spread;
  RiccatiSpec spec;
  double gamma = 0.0;    // relative risk aversion, in (0, 1)
  double horizon = 0.0;  // T
  double t_n = 0.0;      // critical horizon; equals spec.t_esc
};

/// Critical horizon T_N(gamma): +infinity for gamma >= gamma0, finite (the
/// Riccati escape time) for gamma < gamma0. Does not require a horizon.
double critical_horizon(const MarketParams& p, double gamma);

/// Builds the full solution. Throws IllPosedHorizon (carrying gamma, gamma0
/// and T_N) when horizon >= T_N: expected utility is infinite there and no
/// finite value function exists.
MertonSolution merton_specialize(const MarketParams& p, double gamma,
                                 double horizon);

/// v(x, z, t) for x > 0, 0 <= t <= horizon. May overflow to +infinity close
/// to the critical horizon; use value_function_exponent for comparisons there.
double value_function(const MertonSolution& sol, double x, double z, double t);

/// log(x^{1-gamma} e^{gamma(g + h z^2/2)}) = (1-gamma) log x +
/// gamma (g + h z^2/2): strictly increasing in v, finite when v overflows.
double value_function_exponent(const MertonSolution& sol, double x, double z,
                               double t);

/// The optimal weights pi*(z,t) = [ (1/gamma)(Sigma Sigma^T)^{-1} alpha
/// + h(T-t) (1,-c)^T ] z. Defined for 0 <= t <= horizon; linear in z.
Vec2 optimal_weights(const MertonSolution& sol, double z, double t);

/// The market-neutral closed form: prefactor
/// (-kappa/sigma_z2) (1 + coth((kappa/sqrt(gamma))(T-t))/sqrt(gamma)) /
/// (1 + sqrt(gamma) coth((kappa/sqrt(gamma))(T-t))) times z (1,-c)^T.
/// Requires the market-neutrality condition (ConditionViolated otherwise) and
/// t < T (TerminalTime at t = T; the t -> T limit agrees with
/// optimal_weights at t = T). Equals optimal_weights whenever defined.
Vec2 mn_optimal_weights(const MarketParams& p, double gamma, double horizon,
                        double z, double t);

}  // namespace spreadopt
