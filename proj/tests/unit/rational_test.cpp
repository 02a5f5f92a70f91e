#include "doctest.h"

#include "puw/rational.hpp"

using namespace puw;

TEST_CASE("rationals reduce, compare and multiply exactly") {
  CHECK(Rational(4, 2).str() == "2");
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(5, 2).str() == "5/2");
  CHECK(rational_less(Rational(1, 3), Rational(1, 2)));
  CHECK_FALSE(rational_less(Rational(1, 2), Rational(1, 3)));
  CHECK(rational_mul(Rational(2, 3), Rational(3, 2)) == Rational(1, 1));
  CHECK(rational_mul(Rational(7, 5), Rational(10, 21)) == Rational(2, 3));
  CHECK_THROWS_AS(Rational(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("rational clamp keeps values inside the window") {
  const Rational lo(1, 2), hi(2, 1);
  CHECK(rational_clamp(Rational(1, 4), lo, hi) == lo);
  CHECK(rational_clamp(Rational(3, 1), lo, hi) == hi);
  CHECK(rational_clamp(Rational(1, 1), lo, hi) == Rational(1, 1));
}

TEST_CASE("rational parsing accepts integers, fractions and decimals") {
  CHECK(rational_parse("3") == Rational(3, 1));
  CHECK(rational_parse("3/2") == Rational(3, 2));
  CHECK(rational_parse("1.5") == Rational(3, 2));
  CHECK(rational_parse("0.25") == Rational(1, 4));
  CHECK_THROWS_AS(rational_parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(rational_parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(rational_parse(""), std::invalid_argument);
  CHECK_THROWS_AS(rational_parse("-2"), std::invalid_argument);
}

TEST_CASE("overflowing products fall back to a close approximation") {
  // numerator/denominator products overflow 64 bits, but the value is near 1
  // and well inside the approximation's range
  const std::uint64_t big = std::uint64_t(1) << 40;
  const Rational a(big + 1, big - 1);
  const Rational b(big + 3, big - 3);
  const Rational p = rational_mul(a, b);
  const double expect = a.to_double() * b.to_double();
  CHECK(p.to_double() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("products beyond the representable range saturate instead of collapsing") {
  const Rational a(std::uint64_t(1) << 40, 3);
  const Rational b(std::uint64_t(1) << 40, 7);
  const Rational p = rational_mul(a, b);  // true value ~5.8e22 exceeds uint64
  CHECK(p.to_double() >= 1e19);
  CHECK(p.den == 1);
}

TEST_CASE("rational approximation recovers simple fractions") {
  const Rational r = rational_approx(0.5, 1000);
  CHECK(r == Rational(1, 2));
  const Rational t = rational_approx(1.0 / 3.0, 1000000);
  CHECK(t == Rational(1, 3));
}
