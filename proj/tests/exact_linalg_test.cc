#include <gtest/gtest.h>

#include <random>

#include "tncert/error.h"
#include "tncert/exact_linalg.h"

using namespace tncert;

namespace {

RationalMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  RationalMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

RationalMatrix diag(std::vector<Rational> d) {
  RationalMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

}  // namespace

TEST(ExactLinalg, InverseAndRank) {
  RationalMatrix a(2, 2);
  a(0, 0) = 2, a(0, 1) = 1, a(1, 0) = 1, a(1, 1) = 1;
  EXPECT_EQ(a * inverse(a), RationalMatrix::identity(2));
  RationalMatrix s(2, 2);
  s(0, 0) = 1, s(0, 1) = 2, s(1, 0) = 2, s(1, 1) = 4;
  EXPECT_EQ(rank(s), 1u);
  EXPECT_THROW(inverse(s), Error);
}

TEST(ExactLinalg, KernelBasisIsKernel) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    RationalMatrix a = random_matrix(3, 5, rng);
    auto ker = kernel_basis(a);
    EXPECT_EQ(ker.size() + rank(a), 5u);
    for (const auto& v : ker)
      for (std::size_t i = 0; i < 3; ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < 5; ++j) s += a(i, j) * v[j];
        EXPECT_EQ(s, 0);
      }
  }
}

TEST(ExactLinalg, SparseEchelonRankMatchesDense) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    RationalMatrix a = random_matrix(6, 4, rng);
    for (std::size_t j = 0; j < 4; ++j) a(5, j) = a(0, j) + a(1, j);
    SparseEchelon e;
    for (std::size_t i = 0; i < 6; ++i) {
      SparseVector v;
      for (std::size_t j = 0; j < 4; ++j)
        if (a(i, j) != 0) v.emplace_back(static_cast<int>(j), a(i, j));
      e.insert(v);
    }
    EXPECT_EQ(e.rank(), rank(a));
  }
}

TEST(ExactLinalg, LdltReconstructsPsdMatrices) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    RationalMatrix b = random_matrix(3, 5, rng);
    RationalMatrix a = transpose(b) * b;  // PSD of rank <= 3
    LdltResult f = ldlt(a);
    ASSERT_TRUE(f.psd);
    RationalMatrix d = diag(f.pivots);
    EXPECT_EQ(f.lower * d * transpose(f.lower), a);
  }
}

TEST(ExactLinalg, LdltRejectsIndefinite) {
  RationalMatrix a = diag({1, -1, 2});
  LdltResult f = ldlt(a);
  EXPECT_FALSE(f.psd);
  EXPECT_EQ(f.failed_pivot, 1u);
  // zero pivot with a nonzero remaining row
  RationalMatrix z(2, 2);
  z(0, 1) = z(1, 0) = 1;
  EXPECT_FALSE(ldlt(z).psd);
  EXPECT_TRUE(ldlt(RationalMatrix(3, 3)).psd);
}
