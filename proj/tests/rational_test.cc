#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tncert/error.h"
#include "tncert/rational.h"

using namespace tncert;

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(to_string(parse_rational("6/4")), "3/2");
  EXPECT_EQ(to_string(parse_rational("-7")), "-7");
  EXPECT_EQ(to_string(parse_rational("0/5")), "0");
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("x"), Error);
  EXPECT_THROW(parse_rational(""), Error);
  EXPECT_THROW(parse_rational("1.5"), Error);
}

TEST(Rational, DyadicRounding) {
  EXPECT_EQ(round_to_dyadic(0.3, 2), Rational(1, 4));
  EXPECT_EQ(round_to_dyadic(-0.375, 2), Rational(-1, 2));  // tie away from zero
  EXPECT_EQ(floor_to_dyadic(2.9999999, 20), Rational(3 * 1048576 - 1, 1048576));
  EXPECT_EQ(floor_to_dyadic(-0.1, 1), Rational(-1, 2));
  EXPECT_EQ(floor_to_dyadic(3.0, 20), Rational(3));
}

TEST(Rational, FloorIsBelowAndTight) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    double x = u(rng);
    Rational f = floor_to_dyadic(x, 20);
    EXPECT_LE(f, Rational(x));
    EXPECT_GT(f + Rational(1, 1 << 20), Rational(x));
    Rational r = round_to_dyadic(x, 30);
    EXPECT_LE(std::abs(to_double(r) - x), std::ldexp(1.0, -31));
  }
}
