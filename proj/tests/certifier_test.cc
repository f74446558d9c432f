#include <gtest/gtest.h>

#include <random>

#include "test_support.h"
#include "tncert/certifier.h"
#include "tncert/error.h"
#include "tncert/presets.h"
#include "tncert/sdp.h"

using namespace tncert;
using tncert::testing::mono;

namespace {

struct Pipeline {
  ChainComplexData complex;
  SOSProblem problem;
  RepairOutcome outcome;
};

Pipeline certify(const std::string& preset, SOSMode mode) {
  Pipeline p{preset_complex(preset, mode.degree + 1), {}, {}};
  p.problem = encode(p.complex, mode);
  GramSolution s = solve(p.problem);
  p.outcome = round_and_repair(s, p.problem);
  return p;
}

// Directions V with A(V) = 0 (ε fixed), from the exact constraint matrix.
std::vector<RationalMatrix> gram_kernel(const SOSProblem& p) {
  const std::size_t n = p.gram_size();
  std::vector<std::pair<int, int>> vars;
  std::map<std::pair<int, int>, std::size_t> col;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      col[{static_cast<int>(i), static_cast<int>(j)}] = vars.size();
      vars.emplace_back(i, j);
    }
  RationalMatrix a(p.constraints.size(), vars.size());
  for (std::size_t r = 0; r < p.constraints.size(); ++r)
    for (const auto& t : p.constraints[r].terms) a(r, col[{t.p, t.q}]) = t.coeff;
  std::vector<RationalMatrix> out;
  for (const auto& v : kernel_basis(a)) {
    RationalMatrix m(n, n);
    for (std::size_t k = 0; k < vars.size(); ++k) m(vars[k].first, vars[k].second) = m(vars[k].second, vars[k].first) = v[k];
    out.push_back(m);
  }
  return out;
}

}  // namespace

TEST(Certifier, CyclicThreeOzawa) {
  auto p = certify("cyclic:3", {SOSKind::kOzawa, 0});
  const Certificate& c = p.outcome.certificate;
  EXPECT_GE(c.epsilon, Rational(5, 2));
  EXPECT_LE(c.epsilon, 3);
  auto r = verify_certificate(c, p.complex);
  EXPECT_TRUE(r.accepted()) << r.first_failure.value_or("");
  EXPECT_EQ(verify_exit_code(r), 0);
}

TEST(Certifier, ExactInputIsAFixedPoint) {
  SOSProblem p;
  p.mode = {SOSKind::kBracket, 1};
  p.basis.entries = {{0, 0}};
  p.constraints.push_back({{0, 0, 0}, {{0, 0, Rational(1)}}, Rational(3, 2), Rational(-1)});
  p.epsilon_cap = 10;
  GramSolution s;
  s.Q = Eigen::MatrixXd::Constant(1, 1, 1.0);
  s.epsilon = 0.5;
  s.status = SolveStatus::kConverged;
  RepairOutcome r = round_and_repair(s, p);
  EXPECT_EQ(r.certificate.epsilon, Rational(1, 2));
  EXPECT_EQ(r.repair_norm, 0);
  EXPECT_EQ(r.retries, 0);
  EXPECT_EQ(r.certificate.gram(0, 0), 1);
}

TEST(Certifier, IntegersNeverCertify) {
  auto c = preset_complex("z");
  EncodeOptions eo;
  eo.half_radius = 2;
  SOSProblem p = encode(c, {SOSKind::kOzawa, 0}, eo);
  GramSolution s = solve(p);
  for (double fake : {s.epsilon, 1e-5, 0.01, 0.3}) {
    GramSolution t = s;
    t.epsilon = fake;
    t.status = SolveStatus::kConverged;
    try {
      round_and_repair(t, p);
      ADD_FAILURE() << "certificate for Z at ε " << fake;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kPsdFailedAfterRetries || e.code() == ErrorCode::kRepairSingular)
          << e.what();
    }
  }
}

TEST(Certifier, RejectsUnconvergedOrDegenerate) {
  SOSProblem p = encode(preset_complex("cyclic:3"), {SOSKind::kOzawa, 0});
  GramSolution s = solve(p);
  s.status = SolveStatus::kMaxIter;
  EXPECT_THROW(round_and_repair(s, p), Error);
}

TEST(Verify, TamperedGramEntryNamesTheConstraint) {
  auto p = certify("cyclic:3", {SOSKind::kBracket, 1});
  Certificate c = p.outcome.certificate;
  c.gram(0, 0) += Rational(1) / (Rational(1 << 30) * Rational(1 << 30));
  auto r = verify_certificate(c, p.complex);
  EXPECT_FALSE(r.identity_ok);
  ASSERT_TRUE(r.first_failure);
  EXPECT_NE(r.first_failure->find("identity violated at (0,0,"), std::string::npos);
  EXPECT_EQ(verify_exit_code(r), 2);
}

TEST(Verify, IndefiniteGramWithExactIdentity) {
  auto p = certify("cyclic:3", {SOSKind::kOzawa, 0});
  Certificate c = p.outcome.certificate;
  auto ker = gram_kernel(p.problem);
  ASSERT_FALSE(ker.empty());
  // move along a kernel direction until the Gram becomes indefinite
  bool found = false;
  for (Rational t = 1; !found && t < Rational(1 << 30); t *= 2)
    for (int sign : {1, -1}) {
      Certificate d = c;
      for (std::size_t a = 0; a < c.gram.rows(); ++a)
        for (std::size_t b = 0; b < c.gram.cols(); ++b) d.gram(a, b) += sign * t * ker[0](a, b);
      if (!ldlt(d.gram).psd) {
        c = d;
        found = true;
        break;
      }
    }
  ASSERT_TRUE(found);
  auto r = verify_certificate(c, p.complex);
  EXPECT_TRUE(r.identity_ok) << r.first_failure.value_or("");
  EXPECT_FALSE(r.psd_ok);
  ASSERT_TRUE(r.first_failure);
  EXPECT_NE(r.first_failure->find("pivot"), std::string::npos);
  EXPECT_EQ(verify_exit_code(r), 3);
}

TEST(Verify, MismatchedComplexOrConvention) {
  auto p = certify("cyclic:3", {SOSKind::kOzawa, 0});
  try {
    verify_certificate(p.outcome.certificate, preset_complex("cyclic:4"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFingerprintMismatch);
  }
  Certificate c = p.outcome.certificate;
  c.convention = "delta0=sum_s(1-s)";
  try {
    verify_certificate(c, p.complex);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConventionMismatch);
  }
}

TEST(Factors, RankOneToy) {
  auto ball = enumerate_ball(preset_presentation("z"), 2);
  Certificate c;
  c.mode = {SOSKind::kOzawa, 0};
  c.basis.ideal = true;
  c.basis.half_radius = 1;
  c.basis.entries = {{ball->edge(0, 0), 0}};
  c.gram = RationalMatrix(1, 1);
  c.gram(0, 0) = 4;
  auto f = extract_factors(c, ball);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].pivot, 4);
  EXPECT_EQ(f[0].y(0, 0), mono(ball, "t") - mono(ball, "e"));
  c.gram(0, 0) = 0;
  EXPECT_TRUE(extract_factors(c, ball).empty());
}

TEST(Factors, ReexpandToTheTarget) {
  for (SOSMode m : {SOSMode{SOSKind::kOzawa, 0}, SOSMode{SOSKind::kBracket, 2}, SOSMode{SOSKind::kParen, 1}}) {
    auto p = certify("cyclic:3", m);
    const Certificate& c = p.outcome.certificate;
    auto ball = enumerate_ball(p.complex.presentation, 2 * c.basis.half_radius);
    auto factors = extract_factors(c, ball);
    EXPECT_LE(factors.size(), c.gram.rows());
    GroupRingMatrix sum(c.module_rank, c.module_rank, ball);
    for (const auto& f : factors) {
      sum = mat_add(sum, mat_scale(mat_mul(mat_star(f.y), f.y, ball), f.pivot));
      if (m.ideal())
        for (std::size_t j = 0; j < f.y.cols(); ++j) EXPECT_EQ(augmentation(f.y(0, j)), 0);
    }
    Target t = build_target(p.complex, m);
    GroupRingMatrix expected = mat_add(mat_lift(t.c0, ball), mat_scale(mat_lift(t.c1, ball), c.epsilon));
    EXPECT_EQ(sum, expected) << mode_name(m.kind);
  }
}

TEST(Retreat, BracketMonotoneSafety) {
  auto p = certify("cyclic:4", {SOSKind::kBracket, 1});
  const Certificate& c = p.outcome.certificate;
  RationalMatrix unit = order_unit_gram(p.problem, p.complex);
  for (Rational e : std::vector<Rational>{Rational(0), Rational(c.epsilon / 3), Rational(c.epsilon / 2),
                                          Rational(c.epsilon - Rational(1, 1 << 20))}) {
    Certificate r = retreat_certificate(c, e, unit);
    EXPECT_EQ(r.epsilon, e);
    auto v = verify_certificate(r, p.complex);
    EXPECT_TRUE(v.accepted()) << to_string(e) << ": " << v.first_failure.value_or("");
  }
}

TEST(Retreat, OrderUnitExpandsToMinusC1) {
  for (SOSMode m : {SOSMode{SOSKind::kOzawa, 0}, SOSMode{SOSKind::kBracket, 1}, SOSMode{SOSKind::kParen, 2}}) {
    auto c = preset_complex("cyclic:5", 3);
    auto p = encode(c, m);
    RationalMatrix u = order_unit_gram(p, c);
    EXPECT_TRUE(ldlt(u).psd);
    for (const auto& con : p.constraints) {
      Rational lhs = 0;
      for (const auto& t : con.terms) lhs += t.coeff * u(t.p, t.q);
      EXPECT_EQ(lhs, -con.c1);
    }
  }
}

TEST(CertificateFile, CanonicalRoundTrip) {
  auto p = certify("cyclic:3", {SOSKind::kParen, 1});
  Certificate c = p.outcome.certificate;
  c.params = {{"seed", "7"}};
  std::string text = serialize(c);
  EXPECT_EQ(parse_certificate(text), c);
  EXPECT_THROW(parse_certificate(text + "\n"), Error);
  std::string spaced = text;
  spaced.insert(spaced.find("mode ") + 5, " ");
  EXPECT_THROW(parse_certificate(spaced), Error);
  EXPECT_THROW(parse_certificate(text.substr(0, text.size() - 4)), Error);
}

TEST(ExpandGram, ParallelMatchesSerial) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    auto [c, p] = tncert::testing::random_encoding(rng);
    const std::size_t n = p.gram_size();
    RationalMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) q(i, j) = q(j, i) = tncert::testing::random_rational(rng);
    auto ball = enumerate_ball(c.presentation, 2 * p.half_radius());
    EXPECT_EQ(expand_gram(p.basis, p.module_rank, q, ball), serial::expand_gram(p.basis, p.module_rank, q, ball));
  }
}
