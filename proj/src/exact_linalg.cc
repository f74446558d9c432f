#include "tncert/exact_linalg.h"

#include <algorithm>

#include "tncert/error.h"

namespace tncert {

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::kShapeMismatch, "rational matrix product");
  RationalMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (b(k, j) != 0) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

RationalMatrix transpose(const RationalMatrix& a) {
  RationalMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& m) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && m(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(row, j));
    Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      Rational f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j)
        if (m(row, j) != 0) m(i, j) -= f * m(row, j);
    }
    pivot_cols.push_back(col);
    ++row;
  }
  return pivot_cols;
}

}  // namespace

RationalMatrix inverse(const RationalMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kShapeMismatch, "inverse of non-square matrix");
  std::size_t n = a.rows();
  RationalMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  auto pivots = rref(aug);
  if (pivots.size() < n || (n > 0 && pivots[n - 1] != n - 1))
    throw Error(ErrorCode::kInvalidArgument, "matrix is singular");
  RationalMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

std::size_t rank(const RationalMatrix& a) {
  RationalMatrix m = a;
  return rref(m).size();
}

std::vector<std::vector<Rational>> kernel_basis(const RationalMatrix& a) {
  RationalMatrix m = a;
  auto pivots = rref(m);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(a.cols());
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

void axpy(SparseVector& a, const Rational& factor, const SparseVector& b) {
  SparseVector out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(std::move(a[i++]));
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, factor * b[j].second);
      ++j;
    } else {
      Rational v = a[i].second + factor * b[j].second;
      if (v != 0) out.emplace_back(a[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  a = std::move(out);
}

SparseVector SparseEchelon::reduce(SparseVector v) const {
  while (!v.empty()) {
    auto it = pivots_.find(v.front().first);
    if (it == pivots_.end()) break;
    Rational f = -v.front().second;
    axpy(v, f, it->second);
  }
  return v;
}

bool SparseEchelon::insert(SparseVector v) {
  v = reduce(std::move(v));
  if (v.empty()) return false;
  Rational inv = 1 / v.front().second;
  for (auto& [idx, val] : v) val *= inv;
  int lead = v.front().first;
  pivots_.emplace(lead, std::move(v));
  return true;
}

bool SparseEchelon::contains(SparseVector v) const { return reduce(std::move(v)).empty(); }

LdltResult ldlt(const RationalMatrix& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw Error(ErrorCode::kShapeMismatch, "ldlt of non-square matrix");
  std::size_t n = symmetric.rows();
  RationalMatrix s = symmetric;  // Schur complement, updated in place
  LdltResult out;
  out.lower = RationalMatrix::identity(n);
  out.pivots.assign(n, Rational(0));
  for (std::size_t k = 0; k < n; ++k) {
    Rational d = s(k, k);
    if (d < 0) {
      out.failed_pivot = k;
      return out;
    }
    if (d == 0) {
      for (std::size_t i = k + 1; i < n; ++i)
        if (s(i, k) != 0) {
          out.failed_pivot = k;
          return out;
        }
      continue;
    }
    out.pivots[k] = d;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (s(i, k) == 0) continue;
      Rational l = s(i, k) / d;
      out.lower(i, k) = l;
      for (std::size_t j = k + 1; j <= i; ++j) {
        if (s(k, j) == 0) continue;
        s(i, j) -= l * s(k, j);
        s(j, i) = s(i, j);
      }
    }
  }
  out.psd = true;
  return out;
}

}  // namespace tncert
