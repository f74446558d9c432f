#include <gtest/gtest.h>

#include "test_support.h"
#include "tncert/error.h"
#include "tncert/presets.h"
#include "tncert/resolution.h"

using namespace tncert;
using tncert::testing::mono;

TEST(Fox, Axioms) {
  auto p = preset_presentation("free:2");  // x1, x2
  auto b = enumerate_ball(p, 4);
  EXPECT_EQ(fox_derivative(parse_word(*p, "x1 x2"), 0, b), mono(b, "e"));
  EXPECT_EQ(fox_derivative(parse_word(*p, "x1^-1"), 0, b), mono(b, "x1^-1", -1));
  EXPECT_TRUE(fox_derivative(parse_word(*p, "x2"), 0, b).is_zero());
  FreeWord comm = parse_word(*p, "x1 x2 x1^-1 x2^-1");
  EXPECT_EQ(fox_derivative(comm, 0, b), mono(b, "e") - mono(b, "x1 x2 x1^-1"));
  EXPECT_EQ(fox_derivative(comm, 1, b), mono(b, "x1") - mono(b, "x1 x2 x1^-1 x2^-1"));
  EXPECT_THROW(fox_derivative(comm, 0, enumerate_ball(p, 1)), Error);
}

TEST(PresentationComplex, Examples) {
  auto z = preset_complex("z");
  ASSERT_EQ(z.ranks, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(z.d(1)(0, 0), mono(z.ball, "t") - mono(z.ball, "e"));
  EXPECT_TRUE(z.terminal);

  auto z2 = preset_complex("z2");
  ASSERT_EQ(z2.ranks, (std::vector<std::size_t>{1, 2, 1}));
  const auto& b = z2.ball;
  EXPECT_EQ(z2.d(2)(0, 0), mono(b, "e") - mono(b, "b"));
  EXPECT_EQ(z2.d(2)(1, 0), mono(b, "a") - mono(b, "e"));

  auto p3 = parse_presentation("gens t\nrel t^3\nbackend cyclic 3\n");
  auto c3 = build_presentation_complex(p3, enumerate_ball(p3, Ball::kFull));
  EXPECT_EQ(c3.d(2)(0, 0), mono(c3.ball, "e") + mono(c3.ball, "t") + mono(c3.ball, "t^2"));
  EXPECT_TRUE(check_complex(c3).ok());
}

TEST(CyclicResolution, Differentials) {
  auto c = preset_complex("cyclic:3", 3);
  const auto& b = c.ball;
  auto t1 = mono(b, "t") - mono(b, "e");
  auto n = mono(b, "e") + mono(b, "t") + mono(b, "t^2");
  EXPECT_EQ(c.d(1)(0, 0), t1);
  EXPECT_EQ(c.d(2)(0, 0), n);
  EXPECT_EQ(c.d(3)(0, 0), t1);
  for (int k = 2; k <= 6; ++k) {
    auto ck = preset_complex("cyclic:" + std::to_string(k));
    EXPECT_TRUE(gr_mul(ck.d(1)(0, 0), ck.d(2)(0, 0), ck.ball).is_zero()) << k;
    EXPECT_TRUE(check_complex(ck).ok()) << k;
  }
  auto triv = preset_complex("trivial");
  for (int k = 1; k <= triv.top_degree(); ++k)
    if (k % 2 == 1) EXPECT_TRUE(triv.d(k).is_zero());
}

TEST(AttachDifferential, Examples) {
  auto p = preset_presentation("cyclic:3");
  auto ball = enumerate_ball(p, Ball::kFull);
  auto c = cyclic_resolution(3, 2, ball);
  GroupRingMatrix good(1, 1, ball), bad(1, 1, ball), shape(2, 1, ball);
  good.set(0, 0, mono(ball, "t") - mono(ball, "e"));
  bad.set(0, 0, mono(ball, "t"));
  EXPECT_EQ(attach_user_differential(c, 3, good).top_degree(), 3);
  try {
    attach_user_differential(c, 3, bad);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAComplex);
  }
  try {
    attach_user_differential(c, 3, shape);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Laplacian, Examples) {
  auto z = preset_complex("z");
  auto l0 = laplacian(z, 0);
  const auto& b = l0.matrix.ball();
  EXPECT_EQ(l0.matrix(0, 0), mono(b, "e", 2) - mono(b, "t") - mono(b, "t^-1"));

  auto c3 = preset_complex("cyclic:3");
  auto l1 = laplacian(c3, 1);
  const auto& g = c3.ball;
  EXPECT_EQ(l1.matrix(0, 0), mono(g, "e", 5) + mono(g, "t", 2) + mono(g, "t^2", 2));
  EXPECT_FALSE(l1.truncated);

  auto z2 = preset_complex("z2");
  auto l = laplacian(z2, 1);
  EXPECT_EQ(mat_star(l.matrix), l.matrix);
  const auto& bb = l.matrix.ball();
  // (1-a^-1)(1-a) + (1-b)(1-b^-1)
  EXPECT_EQ(l.matrix(0, 0), mono(bb, "e", 4) - mono(bb, "a") - mono(bb, "a^-1") - mono(bb, "b") - mono(bb, "b^-1"));
}

TEST(Laplacian, TruncatedTopIsFlagged) {
  auto z2 = preset_complex("z2");
  EXPECT_TRUE(laplacian(z2, 2).truncated);
  auto z = preset_complex("z");
  EXPECT_FALSE(laplacian(z, 1).truncated);  // Z has a genuine length-1 resolution
}

TEST(CheckComplex, CorruptedDifferentialIsReported) {
  auto z2 = preset_complex("z2");
  ASSERT_TRUE(check_complex(z2).ok());
  auto bad = z2;
  GroupRingMatrix d2 = bad.d(2);
  d2.set(0, 0, mono(bad.ball, "e") - mono(bad.ball, "a"));
  bad.differentials[1] = d2;
  auto rep = check_complex(bad);
  EXPECT_FALSE(rep.ok());
  EXPECT_NE(rep.to_text().find("FAIL"), std::string::npos);
}

TEST(ExactDegree, FiniteResolutions) {
  EXPECT_EQ(preset_complex("cyclic:3").exact_degree, 3);
  EXPECT_EQ(preset_complex("z").exact_degree, 1);
  auto s3 = preset_complex("s3");
  EXPECT_GE(s3.exact_degree, 2);
  EXPECT_TRUE(check_complex(s3).ok());
  EXPECT_EQ(exact_degree_finite(s3), s3.exact_degree);
}

TEST(ComplexSerialization, RoundTripAndFingerprint) {
  for (auto name : {"cyclic:4", "z2", "s3", "free:2"}) {
    auto c = preset_complex(name);
    auto d = parse_complex(serialize(c));
    EXPECT_EQ(serialize(d), serialize(c)) << name;
    EXPECT_EQ(fingerprint(d), fingerprint(c));
  }
  EXPECT_NE(fingerprint(preset_complex("cyclic:3")), fingerprint(preset_complex("cyclic:4")));
  EXPECT_THROW(parse_complex("tncert-complex 1\n"), Error);
}

TEST(IdentitySuite, AllPresets) {
  for (const auto& name : tncert::testing::identity_presets())
    for (const auto& r : tncert::testing::identity_suite(name, 42)) EXPECT_TRUE(r.ok) << r.name << ": " << r.witness;
}
