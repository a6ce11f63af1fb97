#include "spreadopt/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spreadopt {

namespace {

// The unique Condition candidate Sigma Sigma^T (1,-c)^T * (-kappa/sigma_z2),
// shared by check_wellposedness and make_wellposed so that constructed
// parameter sets reproduce it with zero residual up to rounding.
Vec2 condition_drift(const LowerTri2& sigma, double c, double xi) {
  return xi * apply(gram(sigma), Vec2{1.0, -c});
}

}  // namespace

MarketParams validate_market(const MarketParams& p) {
  if (!(p.sigma1 > 0.0)) {
    throw DegenerateVolatility("sigma1 must be > 0, got " +
                               std::to_string(p.sigma1));
  }
  if (!(p.sigma2 > 0.0)) {
    throw DegenerateVolatility("sigma2 must be > 0, got " +
                               std::to_string(p.sigma2));
  }
  if (!(std::abs(p.rho) < 1.0)) {
    throw DegenerateVolatility("|rho| must be < 1, got " +
                               std::to_string(p.rho));
  }
  if (!(p.alpha1 < p.c * p.alpha2)) {
    throw NonMeanReverting(
        "alpha1 < c*alpha2 required for a mean-reverting spread; kappa = " +
        std::to_string(p.c * p.alpha2 - p.alpha1));
  }
  return p;
}

LowerTri2 sigma_matrix(const MarketParams& p) {
  return {p.sigma1, p.sigma2 * p.rho,
          p.sigma2 * std::sqrt(1.0 - p.rho * p.rho)};
}

SpreadParams derive_spread(const MarketParams& p) {
  validate_market(p);
  SpreadParams s;
  s.kappa = p.c * p.alpha2 - p.alpha1;
  s.sigma_z2 = p.sigma1 * p.sigma1 + p.c * p.c * p.sigma2 * p.sigma2 -
               2.0 * p.c * p.rho * p.sigma1 * p.sigma2;
  s.lambda = solve_lower(sigma_matrix(p), Vec2{p.alpha1, p.alpha2});
  s.stationary_var = s.sigma_z2 / (2.0 * s.kappa);
  // Cauchy-Schwarz bounds kappa <= sigma_z * |lambda|, so the ratio is <= 1
  // up to rounding; a few negative ulps are clamped, anything larger is not.
  const double ratio = s.kappa / (std::sqrt(s.sigma_z2) * norm(s.lambda));
  s.gamma0 = std::max(0.0, 1.0 - ratio * ratio);
  return s;
}

WellPosednessReport check_wellposedness(const MarketParams& p) {
  const SpreadParams s = derive_spread(p);
  WellPosednessReport r;
  r.xi = -s.kappa / s.sigma_z2;
  r.gamma0 = s.gamma0;
  const Vec2 alpha{p.alpha1, p.alpha2};
  const Vec2 target = condition_drift(sigma_matrix(p), p.c, r.xi);
  r.residual = std::max(std::abs(alpha.x - target.x),
                        std::abs(alpha.y - target.y));
  const double scale = std::max(std::abs(alpha.x), std::abs(alpha.y));
  r.holds = r.residual <= kConditionTol * scale;
  return r;
}

std::optional<bool> ratio_condition_check(const MarketParams& p, double tol) {
  validate_market(p);
  const double num = p.sigma1 * p.sigma1 - p.c * p.sigma1 * p.sigma2 * p.rho;
  const double den = p.sigma1 * p.sigma2 * p.rho - p.c * p.sigma2 * p.sigma2;
  if (p.alpha2 == 0.0 || den == 0.0) return std::nullopt;
  const double lhs = p.alpha1 / p.alpha2;
  const double rhs = num / den;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  return std::abs(lhs - rhs) <= tol * scale;
}

MarketParams make_wellposed(double sigma1, double sigma2, double rho, double c,
                            double kappa) {
  if (!(kappa > 0.0)) {
    throw NonMeanReverting("target kappa must be > 0, got " +
                           std::to_string(kappa));
  }
  MarketParams p;
  p.sigma1 = sigma1;
  p.sigma2 = sigma2;
  p.rho = rho;
  p.c = c;
  // Validate the volatility block before using it.
  p.alpha1 = -kappa;  // placeholder keeping kappa > 0 during validation
  p.alpha2 = 0.0;
  validate_market(p);
  const double sigma_z2 = sigma1 * sigma1 + c * c * sigma2 * sigma2 -
                          2.0 * c * rho * sigma1 * sigma2;
  const Vec2 alpha =
      condition_drift(sigma_matrix(p), c, -kappa / sigma_z2);
  p.alpha1 = alpha.x;
  p.alpha2 = alpha.y;
  return validate_market(p);
}

}  // namespace spreadopt
