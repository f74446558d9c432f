#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tncert/group_ring.h"
#include "tncert/presets.h"
#include "tncert/resolution.h"
#include "tncert/sos.h"

namespace tncert::testing {

inline Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-9, 9), den(1, 4);
  Rational q(num(rng), den(rng));
  q.canonicalize();  // the two-argument constructor does not reduce
  return q;
}

// Random element supported in the first `support` elements of the ball.
inline GroupRingElement random_element(const BallPtr& ball, std::size_t support, std::mt19937_64& rng,
                                       int terms = 4) {
  support = std::min(support, ball->size());
  std::uniform_int_distribution<int> pick(0, static_cast<int>(support) - 1);
  std::vector<GroupRingElement::Term> t;
  for (int i = 0; i < terms; ++i) t.emplace_back(pick(rng), random_rational(rng));
  return GroupRingElement(ball, std::move(t));
}

inline GroupRingMatrix random_matrix(std::size_t rows, std::size_t cols, const BallPtr& ball, std::size_t support,
                                     std::mt19937_64& rng) {
  GroupRingMatrix m(rows, cols, ball);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, random_element(ball, support, rng, 3));
  return m;
}

// Number of elements of word length <= r in the ball.
inline std::size_t prefix_size(const Ball& ball, int r) {
  std::size_t n = 0;
  while (n < ball.size() && ball.word_length(static_cast<int>(n)) <= r) ++n;
  return n;
}

// Character oracle for Z/n with generator t: Δ₀ acts on the character
// t ↦ ζ^j by 2 - 2cos(2πj/n). N = Σ t^i acts by n on the trivial character
// and 0 elsewhere.
inline double cyclic_delta0_eigenvalue(int n, int j) { return 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * j / n); }

// Δ_k (k >= 1) of the periodic resolution on the character j: one of
// D_k, D_{k+1} is t - e and the other N, in either order, so the value does
// not depend on k.
inline double cyclic_delta_k_eigenvalue(int n, int j) {
  double norm = j % n == 0 ? double(n) * n : 0.0;
  return cyclic_delta0_eigenvalue(n, j) + norm;
}

// Optimal ε for each mode over the full group ring of Z/n (n >= 2).
// Ozawa and paren live on the augmentation ideal (nontrivial characters);
// bracket on the whole ring.
inline double cyclic_ozawa_optimum(int n) {
  double best = INFINITY;
  for (int j = 1; j < n; ++j) best = std::min(best, cyclic_delta0_eigenvalue(n, j));
  return best;
}

inline double cyclic_bracket_optimum(int n) {
  double best = INFINITY;
  for (int j = 0; j < n; ++j) best = std::min(best, cyclic_delta_k_eigenvalue(n, j));
  return best;
}

inline double cyclic_paren_optimum(int n) {
  double best = INFINITY;
  for (int j = 1; j < n; ++j) best = std::min(best, cyclic_delta_k_eigenvalue(n, j));
  return best;
}

struct IdentityResult {
  std::string name;
  bool ok = true;
  std::string witness;
};

// Exact algebraic identities for one preset's complex.
inline std::vector<IdentityResult> identity_suite(const std::string& preset, std::uint64_t seed) {
  std::vector<IdentityResult> out;
  std::mt19937_64 rng(seed);
  ChainComplexData c = preset_complex(preset, 3);
  const PresentationPtr& p = c.presentation;
  const bool finite = c.ball->complete();
  const int top = c.top_degree();
  auto record = [&](std::string name, bool ok, std::string witness = "") {
    out.push_back({preset + ": " + name, ok, ok ? "" : witness});
  };

  int rmax = 0;
  for (int k = 1; k <= top; ++k) rmax = std::max(rmax, c.d(k).support_radius());

  // d_k d_{k+1} = 0, on action matrices D_{k+1} D_k = 0
  for (int k = 1; k < top; ++k) {
    BallPtr b = ball_for(c, 2 * rmax);
    bool ok = mat_mul(c.action(k + 1), c.action(k), b).is_zero();
    record("d" + std::to_string(k) + "·d" + std::to_string(k + 1) + " = 0", ok, "nonzero composition");
  }

  // Fox: Σ_s (∂w/∂s)(s - e) = w - e, for relators and random words
  {
    std::vector<FreeWord> words(p->relators.begin(), p->relators.end());
    std::uniform_int_distribution<int> gen(0, static_cast<int>(p->rank()) - 1), sign(0, 1), len(0, 6);
    for (int t = 0; t < 8; ++t) {
      FreeWord w;
      for (int i = len(rng); i > 0; --i) w.letters.push_back({gen(rng), sign(rng) ? 1 : -1});
      words.push_back(w);
    }
    bool ok = true;
    std::string witness;
    for (const auto& w : words) {
      int r = static_cast<int>(w.length()) + 1;
      BallPtr b = finite ? c.ball : enumerate_ball(p, r);
      GroupRingElement sum(b);
      for (std::size_t s = 0; s < p->rank(); ++s) {
        GroupRingElement fs = fox_derivative(w, static_cast<int>(s), b);
        sum = sum + gr_mul(fs, GroupRingElement::augmentation_generator(b, b->edge(0, static_cast<int>(2 * s))), b);
      }
      auto idx = b->find(eval_word(*p, w));
      GroupRingElement rhs = GroupRingElement::monomial(b, *idx) - GroupRingElement::identity(b);
      if (!(sum == rhs)) {
        ok = false;
        witness = "word " + to_text(*p, w);
        break;
      }
    }
    record("Fox fundamental identity", ok, witness);
  }

  // Δ* = Δ and Δ_k D_k = D_k Δ_{k-1}
  std::vector<LaplacianMatrix> lap;
  for (int k = 0; k <= top; ++k) lap.push_back(laplacian(c, k));
  for (int k = 0; k <= top; ++k) record("Δ" + std::to_string(k) + "* = Δ" + std::to_string(k),
                                        mat_star(lap[k].matrix) == lap[k].matrix, "asymmetric entry");
  for (int k = 1; k <= top; ++k) {
    int r = std::max(lap[k].support_radius, lap[k - 1].support_radius) + rmax;
    BallPtr b = ball_for(c, r);
    GroupRingMatrix lhs = mat_mul(lap[k].matrix, c.action(k), b);
    GroupRingMatrix rhs = mat_mul(c.action(k), lap[k - 1].matrix, b);
    record("Δ" + std::to_string(k) + "D" + std::to_string(k) + " = D" + std::to_string(k) + "Δ" +
               std::to_string(k - 1),
           lhs == rhs, "chain map fails");
  }

  // (AB)* = B*A* and ε(ab) = ε(a)ε(b)
  {
    BallPtr small = finite ? c.ball : enumerate_ball(p, 2);
    BallPtr big = finite ? c.ball : enumerate_ball(p, 4);
    std::size_t support = finite ? small->size() : prefix_size(*small, 2);
    bool star_ok = true, aug_ok = true;
    for (int t = 0; t < 5; ++t) {
      GroupRingMatrix a = random_matrix(2, 3, small, support, rng), b = random_matrix(3, 2, small, support, rng);
      if (!(mat_star(mat_mul(a, b, big)) == mat_mul(mat_star(b), mat_star(a), big))) star_ok = false;
      GroupRingElement x = random_element(small, support, rng), y = random_element(small, support, rng);
      if (augmentation(gr_mul(x, y, big)) != augmentation(x) * augmentation(y)) aug_ok = false;
    }
    record("(AB)* = B*A*", star_ok, "random matrices");
    record("ε(ab) = ε(a)ε(b)", aug_ok, "random elements");
  }
  return out;
}

inline std::vector<std::string> identity_presets() {
  return {"trivial", "cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5", "cyclic:6", "z", "z2", "s3", "free:2"};
}

// Monomial for a word such as "a b a^-1"; "e" or "" is the identity.
inline GroupRingElement mono(const BallPtr& ball, std::string_view word, const Rational& q = Rational(1)) {
  const Presentation& p = *ball->presentation();
  FreeWord w = (word.empty() || word == "e") ? FreeWord{} : parse_word(p, word);
  auto idx = ball->find(eval_word(p, w));
  if (!idx) throw std::runtime_error("word outside ball");
  return GroupRingElement::monomial(ball, *idx, q);
}

struct Encoding {
  ChainComplexData complex;
  SOSProblem problem;
};

// A random valid encoding over a small preset, for round-trip properties.
inline Encoding random_encoding(std::mt19937_64& rng) {
  static const std::vector<std::string> presets = {"cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5", "cyclic:6",
                                                   "z",        "z2",       "s3",       "free:2"};
  std::uniform_int_distribution<std::size_t> pick(0, presets.size() - 1);
  std::uniform_int_distribution<int> kind(0, 2), radius(1, 2);
  for (;;) {
    const std::string& name = presets[pick(rng)];
    SOSMode mode{static_cast<SOSKind>(kind(rng)), 0};
    ChainComplexData c = preset_complex(name, 3);
    if (mode.kind != SOSKind::kOzawa) mode.degree = std::uniform_int_distribution<int>(1, c.top_degree())(rng);
    EncodeOptions eo;
    eo.assert_resolution = true;
    int dmin = default_half_radius(c, mode);
    eo.half_radius = std::max(dmin, radius(rng));
    if (!c.ball->complete() && *eo.half_radius > 2) continue;
    SOSProblem p = encode(c, mode, eo);
    return {std::move(c), std::move(p)};
  }
}

}  // namespace tncert::testing
