#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tncert/rational.h"

namespace tncert {

// Dense row-major matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const RationalMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix transpose(const RationalMatrix& a);

// Throws Error(kInvalidArgument) when singular.
RationalMatrix inverse(const RationalMatrix& a);

std::size_t rank(const RationalMatrix& a);

// Basis of the right kernel {x : a x = 0}, one vector per free column.
std::vector<std::vector<Rational>> kernel_basis(const RationalMatrix& a);

// Sparse vector: sorted (index, nonzero value) pairs.
using SparseVector = std::vector<std::pair<int, Rational>>;

// Incrementally maintained row echelon form. Used for exact ranks of large,
// sparse coboundary matrices and for span-membership tests.
class SparseEchelon {
 public:
  // Reduces v against the stored pivots; returns true when v added a new
  // pivot (i.e. was not in the span).
  bool insert(SparseVector v);
  // True when v lies in the current span.
  bool contains(SparseVector v) const;
  std::size_t rank() const { return pivots_.size(); }

 private:
  SparseVector reduce(SparseVector v) const;
  std::map<int, SparseVector> pivots_;  // leading column -> row with leading 1
};

// a <- a + factor * b
void axpy(SparseVector& a, const Rational& factor, const SparseVector& b);

// Exact LDL^T of a symmetric matrix, processed in natural order. Zero pivots
// are accepted only when the remaining row of the Schur complement is zero,
// which makes acceptance equivalent to positive semidefiniteness.
struct LdltResult {
  bool psd = false;
  // Index of the first offending pivot (negative pivot, or zero pivot with a
  // nonzero remaining row).
  std::optional<std::size_t> failed_pivot;
  std::vector<Rational> pivots;
  RationalMatrix lower;  // unit lower triangular
};

LdltResult ldlt(const RationalMatrix& symmetric);

}  // namespace tncert
