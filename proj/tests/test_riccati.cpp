#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spreadopt/riccati.hpp"

using namespace spreadopt;

namespace {

// One spec per discriminant regime, plus one with a negative constant term.
RiccatiSpec pos() { return make_riccati_spec(-1.0, 1.0, 1.0, 0.5); }   // D=0.5
RiccatiSpec zero() { return make_riccati_spec(-2.0, 4.0, 2.0, 0.5); }  // D=0
RiccatiSpec neg() { return make_riccati_spec(-1.0, 4.0, 0.5, 1.5); }   // D=-2
RiccatiSpec xneg() { return make_riccati_spec(-1.0, 1.0, 1.0, -3.0); } // D=4

constexpr double kNegEsc = 1.5459306102231432;

}  // namespace

TEST_CASE("spec construction validates coefficients") {
  CHECK_THROWS_AS(make_riccati_spec(0.0, 1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_riccati_spec(1.0, 1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_riccati_spec(-1.0, 0.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_riccati_spec(-1.0, 1.0, -1.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_riccati_spec(-1.0, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("discriminant classification and escape time") {
  CHECK(pos().regime == DiscRegime::positive);
  CHECK(pos().disc == 0.5);
  CHECK(std::isinf(pos().t_esc));

  CHECK(zero().regime == DiscRegime::zero);
  CHECK(zero().disc == 0.0);
  CHECK(std::isinf(zero().t_esc));

  CHECK(neg().regime == DiscRegime::negative);
  CHECK(neg().disc == -2.0);
  CHECK(neg().t_esc == doctest::Approx(kNegEsc).epsilon(1e-15));

  CHECK(xneg().regime == DiscRegime::positive);
  CHECK(xneg().disc == 4.0);
}

TEST_CASE("near-zero discriminants are routed to the zero branch") {
  // disc = -4e-14 relative to ab^2 = 4 falls inside the classification band.
  const RiccatiSpec s = make_riccati_spec(-2.0, 4.0, 2.0, 0.5 * (1 + 1e-14));
  CHECK(s.regime == DiscRegime::zero);
  CHECK(std::isinf(s.t_esc));
}

TEST_CASE("h starts at zero in every regime") {
  CHECK(riccati_h(pos(), 0.0) == 0.0);
  CHECK(riccati_h(zero(), 0.0) == 0.0);
  CHECK(riccati_h(neg(), 0.0) == 0.0);
  CHECK(riccati_h(xneg(), 0.0) == 0.0);
  CHECK(riccati_g(pos(), 0.0) == 0.0);
  CHECK(riccati_g(zero(), 0.0) == 0.0);
  CHECK(riccati_g(neg(), 0.0) == 0.0);
  CHECK(riccati_g(xneg(), 0.0) == 0.0);
}

TEST_CASE("h spot values, positive discriminant") {
  const RiccatiSpec s = pos();
  CHECK(riccati_h(s, 0.5) == doctest::Approx(0.1621982637765235).epsilon(1e-14));
  CHECK(riccati_h(s, 1.0) ==
        doctest::Approx(0.23133549703077474).epsilon(1e-14));
  CHECK(riccati_h(s, 2.0) ==
        doctest::Approx(0.27840483397183477).epsilon(1e-14));
}

TEST_CASE("h spot values, zero discriminant are exact rationals") {
  const RiccatiSpec s = zero();  // h(t) = 2t / (1 + 2t)
  CHECK(riccati_h(s, 0.1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(riccati_h(s, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(riccati_h(s, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(riccati_h(s, 3.0) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("h spot values, negative discriminant, both tangent zones") {
  const RiccatiSpec s = neg();
  CHECK(riccati_h(s, 0.3 * kNegEsc) ==
        doctest::Approx(2.1143394526187981).epsilon(1e-13));
  CHECK(riccati_h(s, 0.6 * kNegEsc) ==
        doctest::Approx(4.3644494100264041).epsilon(1e-13));
  CHECK(riccati_h(s, 0.9 * kNegEsc) ==
        doctest::Approx(14.730407366132002).epsilon(1e-13));
  // Near-escape growth stays finite and accurate up to 0.999 t_esc.
  CHECK(riccati_h(s, 0.999 * kNegEsc) ==
        doctest::Approx(1295.7170661075348).epsilon(1e-11));
}

TEST_CASE("h is continuous at the tangent zone boundary") {
  const RiccatiSpec s = neg();
  const double t_switch = 0.25 * 3.14159265358979324 / std::sqrt(2.0);
  const double below = riccati_h(s, t_switch - 1e-9);
  const double above = riccati_h(s, t_switch + 1e-9);
  CHECK(std::abs(above - below) < 1e-6);
}

TEST_CASE("h spot values, negative constant term") {
  const RiccatiSpec s = xneg();
  CHECK(riccati_h(s, 0.5) ==
        doctest::Approx(-0.82734186808001495).epsilon(1e-14));
  CHECK(riccati_h(s, 2.0) ==
        doctest::Approx(-0.99955276650617103).epsilon(1e-14));
}

TEST_CASE("g spot values in every regime") {
  CHECK(riccati_g(pos(), 0.5) ==
        doctest::Approx(0.023305654615708077).epsilon(1e-13));
  CHECK(riccati_g(pos(), 1.0) ==
        doctest::Approx(0.073636989855564733).epsilon(1e-13));
  CHECK(riccati_g(pos(), 2.0) ==
        doctest::Approx(0.2038763718515083).epsilon(1e-13));
  CHECK(riccati_g(zero(), 0.1) ==
        doctest::Approx(0.0088392216030226869).epsilon(1e-13));
  CHECK(riccati_g(zero(), 0.5) ==
        doctest::Approx(0.15342640972002735).epsilon(1e-13));
  CHECK(riccati_g(zero(), 1.0) ==
        doctest::Approx(0.45069385566594515).epsilon(1e-13));
  CHECK(riccati_g(zero(), 3.0) ==
        doctest::Approx(2.0270449254723433).epsilon(1e-13));
  CHECK(riccati_g(neg(), 0.3 * kNegEsc) ==
        doctest::Approx(0.13093152824882617).epsilon(1e-13));
  CHECK(riccati_g(neg(), 0.6 * kNegEsc) ==
        doctest::Approx(0.49489750147206831).epsilon(1e-13));
  CHECK(riccati_g(neg(), 0.9 * kNegEsc) ==
        doctest::Approx(1.3584847507338481).epsilon(1e-13));
  CHECK(riccati_g(xneg(), 0.5) ==
        doctest::Approx(-0.12822087782362715).epsilon(1e-13));
  CHECK(riccati_g(xneg(), 2.0) ==
        doctest::Approx(-0.85621487108634923).epsilon(1e-13));
}

TEST_CASE("g stays finite and accurate at large times") {
  // cosh would overflow past t ~ 1000; the split form must not.
  const RiccatiSpec s = pos();
  const double g = riccati_g(s, 2000.0);
  CHECK(std::isfinite(g));
  // Asymptotically g'(t) -> b2/2 h_inf, so g(t) ~ g(t0) + (t-t0) b2 h_inf / 2.
  const double slope =
      (riccati_g(s, 2000.0) - riccati_g(s, 1000.0)) / 1000.0;
  CHECK(slope ==
        doctest::Approx(0.5 * s.b2 * riccati_h_limit(s)).epsilon(1e-12));
}

TEST_CASE("long-run limit of h") {
  CHECK(riccati_h_limit(pos()) ==
        doctest::Approx(0.29289321881345248).epsilon(1e-15));
  CHECK(riccati_h(pos(), 70.0) ==
        doctest::Approx(0.29289321881345248).epsilon(1e-14));
  CHECK(riccati_h_limit(zero()) == 1.0);
  CHECK(riccati_h(zero(), 1e7) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(riccati_h_limit(xneg()) == -1.0);
  CHECK_THROWS_AS(riccati_h_limit(neg()), DomainError);
}

TEST_CASE("time domain is enforced") {
  CHECK_THROWS_AS(riccati_h(pos(), -1e-9), DomainError);
  CHECK_THROWS_AS(riccati_g(pos(), -1.0), DomainError);
  CHECK_THROWS_AS(riccati_h(neg(), kNegEsc), EscapeTimeExceeded);
  CHECK_THROWS_AS(riccati_h(neg(), 2.0), EscapeTimeExceeded);
  CHECK_THROWS_AS(riccati_g(neg(), kNegEsc * 1.001), EscapeTimeExceeded);
}
