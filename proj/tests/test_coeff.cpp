#include <doctest.h>

#include <random>

#include "ncdiff/coeff.hpp"
#include "ncdiff/errors.hpp"
#include "ncdiff/sampling.hpp"

using namespace ncdiff;

namespace {

const ParameterSet kParams({"p", "q", "r"});
RationalFunction P() { return RationalFunction::parameter(0); }
RationalFunction Qv() { return RationalFunction::parameter(1); }
RationalFunction R() { return RationalFunction::parameter(2); }

RationalFunction random_poly(Rng& rng) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> expo(-1, 2);
  std::uniform_int_distribution<int> count(1, 3);
  RationalFunction out;
  for (int i = count(rng); i > 0; --i) {
    RationalFunction m(coef(rng));
    for (std::uint32_t v = 0; v < 3; ++v) m *= RationalFunction::parameter(v, expo(rng));
    out += m;
  }
  return out;
}

RationalFunction random_rf(Rng& rng) {
  RationalFunction den;
  do {
    den = random_poly(rng);
  } while (den.is_zero());
  return random_poly(rng) / den;
}

}  // namespace

TEST_SUITE("coeff") {

TEST_CASE("monomials cancel against Laurent exponents") {
  CHECK((P() * P().inverse()).is_one());
  CHECK((P().pow(3) / P().pow(5)).same_representation(P().pow(-2)));
  CHECK(to_string(P().pow(-2) * Qv(), kParams) == "p^-2*q");
}

TEST_CASE("common factors cancel") {
  RationalFunction num = P() * P() - 1;
  RationalFunction den = P() - 1;
  RationalFunction x = num / den;
  CHECK(x.same_representation(P() + 1));
  CHECK(x.is_constant() == false);
}

TEST_CASE("sums over a shared denominator") {
  RationalFunction one_minus_r = RationalFunction(1) - R();
  RationalFunction x = R() / one_minus_r + RationalFunction(1);
  CHECK(x == one_minus_r.inverse());
  CHECK(to_string(x, kParams) == "-1/(r - 1)");
}

TEST_CASE("rendering") {
  CHECK(to_string(RationalFunction(0), kParams) == "0");
  CHECK(to_string(RationalFunction(Rational(3, 4)), kParams) == "3/4");
  CHECK(to_string(P() * Qv() - 1, kParams) == "p*q - 1");
  CHECK(needs_parentheses(P() * Qv() - 1));
  CHECK_FALSE(needs_parentheses(P() * Qv()));
  CHECK(to_latex(P() / Qv(), kParams) == "p q^{-1}");
}

TEST_CASE("substitution and evaluation") {
  Bindings b{{2, P() * Qv()}};
  RationalFunction x = R() / (RationalFunction(1) - R());
  RationalFunction y = rf_substitute(x, b);
  Point pt{{0, Rational(2)}, {1, Rational(3)}, {2, Rational(6)}};
  CHECK(rf_eval(x, pt) == Rational(-6, 5));
  CHECK(rf_eval(y, pt) == Rational(-6, 5));
  CHECK(y == P() * Qv() / (RationalFunction(1) - P() * Qv()));
}

TEST_CASE("evaluation at a pole throws") {
  RationalFunction x = RationalFunction(1) / (P() - 1);
  Point pt{{0, Rational(1)}};
  CHECK_THROWS_AS(rf_eval(x, pt), PoleError);
  CHECK_THROWS_AS(rf_eval(P().inverse(), Point{{0, Rational(0)}}), PoleError);
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS_AS(rf_inv(RationalFunction(0)), DivisionByZero);
  CHECK_THROWS_AS(P() / RationalFunction(0), DivisionByZero);
}

TEST_CASE("field axioms on random elements") {
  Rng rng(20041207);
  for (int i = 0; i < 60; ++i) {
    RationalFunction a = random_rf(rng), b = random_rf(rng), c = random_rf(rng);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(rf_is_zero(a - a));
    if (!a.is_zero()) CHECK((a * rf_inv(a)).is_one());
  }
}

TEST_CASE("equal values share one representation") {
  Rng rng(7);
  for (int i = 0; i < 40; ++i) {
    RationalFunction a = random_rf(rng), b = random_rf(rng);
    RationalFunction x = (a + b) * (a - b);
    RationalFunction y = a * a - b * b;
    CHECK(x.same_representation(y));
  }
}

TEST_CASE("evaluation is a ring map") {
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    RationalFunction a = random_rf(rng), b = random_rf(rng);
    Point pt = random_point(3, rng);
    try {
      Rational ea = rf_eval(a, pt), eb = rf_eval(b, pt);
      CHECK(rf_eval(a + b, pt) == ea + eb);
      CHECK(rf_eval(a * b, pt) == ea * eb);
    } catch (const PoleError&) {
    }
  }
}

TEST_CASE("inverse of p - 1/q") {
  RationalFunction x = P() - Qv().inverse();
  RationalFunction inv = rf_inv(x);
  CHECK(inv == Qv() / (P() * Qv() - 1));
  CHECK((inv * x).is_one());
  CHECK(to_string(inv, kParams) == "q/(p*q - 1)");
  CHECK((rf_inv(RationalFunction(1) - R()) * (RationalFunction(1) - R())).is_one());
}

}
