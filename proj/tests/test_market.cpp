#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spreadopt/market.hpp"

using namespace spreadopt;

namespace {

// Well-posed reference set: the drift identity holds exactly.
MarketParams canonical() { return {-0.5, 0.5, 1.0, 1.0, 0.0, 1.0}; }

// Same volatilities, shifted drifts: gamma0 = 0.5, condition fails.
MarketParams shifted() { return {0.0, 1.0, 1.0, 1.0, 0.0, 1.0}; }

}  // namespace

TEST_CASE("validation accepts a mean-reverting market") {
  const MarketParams p = validate_market(canonical());
  CHECK(p.alpha1 == -0.5);
  CHECK(p.c == 1.0);
}

TEST_CASE("validation rejects non-mean-reverting drifts") {
  MarketParams p = canonical();
  p.alpha1 = 0.5;  // kappa = c alpha2 - alpha1 = 0
  CHECK_THROWS_AS(validate_market(p), NonMeanReverting);
  p.alpha1 = 0.7;  // kappa < 0
  CHECK_THROWS_AS(validate_market(p), NonMeanReverting);
}

TEST_CASE("validation rejects degenerate volatilities") {
  MarketParams p = canonical();
  p.rho = 1.0;
  CHECK_THROWS_AS(validate_market(p), DegenerateVolatility);
  p = canonical();
  p.rho = -1.0;
  CHECK_THROWS_AS(validate_market(p), DegenerateVolatility);
  p = canonical();
  p.sigma1 = 0.0;
  CHECK_THROWS_AS(validate_market(p), DegenerateVolatility);
  p = canonical();
  p.sigma2 = -1.0;
  CHECK_THROWS_AS(validate_market(p), DegenerateVolatility);
}

TEST_CASE("spread derivation on the reference set") {
  const SpreadParams s = derive_spread(canonical());
  CHECK(s.kappa == 1.0);
  CHECK(s.sigma_z2 == 2.0);
  CHECK(s.lambda.x == -0.5);
  CHECK(s.lambda.y == 0.5);
  CHECK(s.stationary_var == 1.0);
  CHECK(s.gamma0 >= 0.0);
  CHECK(s.gamma0 <= 1e-12);
}

TEST_CASE("spread derivation on the shifted set") {
  const SpreadParams s = derive_spread(shifted());
  CHECK(s.kappa == 1.0);
  CHECK(s.sigma_z2 == 2.0);
  CHECK(s.lambda.x == 0.0);
  CHECK(s.lambda.y == 1.0);
  CHECK(s.gamma0 == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("spread derivation with a zero cointegration coefficient") {
  const MarketParams p{-0.4, 7.0, 1.3, 1.0, 0.0, 0.0};
  const SpreadParams s = derive_spread(p);
  CHECK(s.kappa == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(s.sigma_z2 == doctest::Approx(1.69).epsilon(1e-15));
}

TEST_CASE("gamma0 stays in [0, 1) under correlation") {
  for (double rho : {-0.9, -0.5, 0.0, 0.3, 0.8}) {
    for (double c : {-1.5, 0.5, 1.0, 2.0}) {
      const MarketParams p{c * 0.7 - 1.1, 0.7, 1.2, 0.9, rho, c};
      const SpreadParams s = derive_spread(p);  // kappa = 1.1 by construction
      CHECK(s.kappa == doctest::Approx(1.1).epsilon(1e-12));
      CHECK(s.gamma0 >= 0.0);
      CHECK(s.gamma0 < 1.0);
    }
  }
}

TEST_CASE("condition verdict on the reference set") {
  const WellPosednessReport r = check_wellposedness(canonical());
  CHECK(r.holds);
  CHECK(r.xi == -0.5);
  CHECK(r.residual == 0.0);
  CHECK(r.gamma0 <= kGamma0Tol);
}

TEST_CASE("condition verdict on the shifted set") {
  const WellPosednessReport r = check_wellposedness(shifted());
  CHECK_FALSE(r.holds);
  CHECK(r.xi == -0.5);
  CHECK(r.residual == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.gamma0 == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("holds implies vanishing gamma0") {
  for (double c : {-1.3, 0.8, 1.0, 1.7}) {
    const MarketParams p = make_wellposed(0.9, 1.2, 0.3, c, 1.4);
    const WellPosednessReport r = check_wellposedness(p);
    CHECK(r.holds);
    CHECK(r.gamma0 <= kGamma0Tol);
  }
}

TEST_CASE("ratio form agrees with the residual form when defined") {
  const auto ref = ratio_condition_check(canonical());
  REQUIRE(ref.has_value());
  CHECK(*ref);
  const auto shifted_check = ratio_condition_check(shifted());
  REQUIRE(shifted_check.has_value());
  CHECK_FALSE(*shifted_check);
  // Constructed sets with nonzero correlation also agree.
  const MarketParams built = make_wellposed(0.9, 1.2, 0.3, 0.8, 1.4);
  const auto built_check = ratio_condition_check(built);
  REQUIRE(built_check.has_value());
  CHECK(*built_check);
}

TEST_CASE("ratio form degenerates to nullopt on vanishing denominators") {
  // alpha2 = 0
  CHECK_FALSE(ratio_condition_check({-1.0, 0.0, 1.0, 1.0, 0.0, 1.0}));
  // rho = 0, c = 0 makes sigma1 sigma2 rho - c sigma2^2 vanish
  CHECK_FALSE(ratio_condition_check({-0.4, 1.0, 1.0, 1.0, 0.0, 0.0}));
}

TEST_CASE("constructed drifts satisfy the identity with zero residual") {
  const MarketParams p = make_wellposed(0.9, 1.2, 0.3, 0.8, 1.4);
  CHECK(p.alpha1 ==
        doctest::Approx(-0.63560830860534125).epsilon(1e-15));
  CHECK(p.alpha2 == doctest::Approx(0.95548961424332344).epsilon(1e-15));
  const SpreadParams s = derive_spread(p);
  CHECK(s.kappa == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(s.stationary_var ==
        doctest::Approx(0.43328571428571429).epsilon(1e-15));
  CHECK(check_wellposedness(p).holds);
}

TEST_CASE("construction reproduces the reference set exactly") {
  const MarketParams p = make_wellposed(1.0, 1.0, 0.0, 1.0, 1.0);
  CHECK(p.alpha1 == -0.5);
  CHECK(p.alpha2 == 0.5);
}

TEST_CASE("construction validates its inputs") {
  CHECK_THROWS_AS(make_wellposed(1.0, 1.0, 0.0, 1.0, 0.0), NonMeanReverting);
  CHECK_THROWS_AS(make_wellposed(1.0, 1.0, 0.0, 1.0, -2.0), NonMeanReverting);
  CHECK_THROWS_AS(make_wellposed(0.0, 1.0, 0.0, 1.0, 1.0),
                  DegenerateVolatility);
  CHECK_THROWS_AS(make_wellposed(1.0, 1.0, 1.0, 1.0, 1.0),
                  DegenerateVolatility);
}
