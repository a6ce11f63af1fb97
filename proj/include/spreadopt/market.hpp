#pragma once

#include <optional>

#include "spreadopt/errors.hpp"
#include "spreadopt/linalg.hpp"

namespace spreadopt {

/// Relative residual below which the drift vector is declared an exact
/// multiple of Sigma Sigma^T (1,-c)^T, i.e. the market-neutrality condition
/// holds. Tight on purpose: the identity is algebraic, so anything beyond
/// rounding noise is a genuine violation.
inline constexpr double kConditionTol = 1e-10;

/// Tolerance of the equivalent "critical risk aversion is zero" decision.
inline constexpr double kGamma0Tol = 1e-10;

/// Primitive coefficients of the two-asset error-correction market: both
/// price drifts load linearly on the log-spread z = log s1 - c log s2 (plus
/// a deterministic drift correction), with constant volatilities.
struct MarketParams {
  double alpha1 = 0.0;  // drift loading of asset 1 on z (1/time)
  double alpha2 = 0.0;  // drift loading of asset 2 on z (1/time)
  double sigma1 = 0.0;  // volatility of asset 1 (1/sqrt(time))
  double sigma2 = 0.0;  // volatility of asset 2 (1/sqrt(time))
  double rho = 0.0;     // instantaneous correlation, |rho| < 1
  double c = 0.0;       // cointegration coefficient
};

/// Derived quantities of the spread process dz = -kappa z dt + sigma_z dW^z.
struct SpreadParams {
  double kappa = 0.0;           // mean-reversion rate, c*alpha2 - alpha1 > 0
  double sigma_z2 = 0.0;        // variance rate of the spread
  Vec2 lambda;                  // Sigma^{-1} alpha (market price of risk)
  double stationary_var = 0.0;  // sigma_z2 / (2 kappa)
  double gamma0 = 0.0;          // critical relative risk aversion, in [0, 1)
};

/// Verdict of the market-neutrality condition: does some xi < 0 satisfy
/// alpha = Sigma Sigma^T (1,-c)^T xi? The only candidate is -kappa/sigma_z2.
struct WellPosednessReport {
  bool holds = false;
  double xi = 0.0;        // -kappa / sigma_z2
  double residual = 0.0;  // max-norm of alpha - Sigma Sigma^T (1,-c)^T xi
  double gamma0 = 0.0;
};

/// Checks sigma1, sigma2 > 0, |rho| < 1 and kappa > 0; returns p unchanged.
/// Throws DegenerateVolatility or NonMeanReverting naming the violation.
MarketParams validate_market(const MarketParams& p);

/// The volatility matrix [[sigma1, 0], [sigma2 rho, sigma2 sqrt(1-rho^2)]].
LowerTri2 sigma_matrix(const MarketParams& p);

/// Derives all spread-level quantities. lambda is computed by triangular
/// substitution; gamma0 = 1 - (kappa / (sigma_z * |lambda|))^2, clamped to 0
/// when rounding drives it a few ulps negative.
SpreadParams derive_spread(const MarketParams& p);

/// Decides the condition via the residual of the exact vector identity.
/// holds implies gamma0 <= kGamma0Tol (the two tests agree by construction).
WellPosednessReport check_wellposedness(const MarketParams& p);

/// Cross-check via the drift-ratio identity
/// alpha1/alpha2 = (sigma1^2 - c sigma1 sigma2 rho)/(sigma1 sigma2 rho - c sigma2^2).
/// Returns nullopt when either denominator vanishes; the residual form above
/// is the deciding test in that case.
std::optional<bool> ratio_condition_check(const MarketParams& p,
                                          double tol = kConditionTol);

/// Constructs drifts alpha = Sigma Sigma^T (1,-c)^T * (-kappa/sigma_z2) so the
/// market-neutrality condition holds exactly for the given volatilities and
/// target mean-reversion rate kappa > 0.
MarketParams make_wellposed(double sigma1, double sigma2, double rho, double c,
                            double kappa);

}  // namespace spreadopt
