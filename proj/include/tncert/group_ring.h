#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tncert/group.h"
#include "tncert/rational.h"

namespace tncert {

// Finitely supported element of QΓ. Coefficients are indexed by positions in
// an ambient Ball; elements over balls of the same presentation are
// interoperable because ball orderings are prefix-stable.
class GroupRingElement {
 public:
  using Term = std::pair<int, Rational>;

  explicit GroupRingElement(BallPtr ball) : ball_(std::move(ball)) {}
  // Sorts, merges duplicate indices and drops zeros.
  GroupRingElement(BallPtr ball, std::vector<Term> terms);

  static GroupRingElement identity(BallPtr ball) { return monomial(std::move(ball), 0, Rational(1)); }
  static GroupRingElement monomial(BallPtr ball, int index, const Rational& coeff = Rational(1));
  // g - e
  static GroupRingElement augmentation_generator(BallPtr ball, int index);

  const BallPtr& ball() const { return ball_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coeff(int index) const;
  // Largest word length in the support (0 for the zero element).
  int support_radius() const;

  bool operator==(const GroupRingElement& other) const;

 private:
  BallPtr ball_;
  std::vector<Term> terms_;
};

GroupRingElement gr_add(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement gr_sub(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement gr_scale(const GroupRingElement& a, const Rational& q);
// Convolution Σ a(x) b(y) xy, indexed in out_ball.
GroupRingElement gr_mul(const GroupRingElement& a, const GroupRingElement& b, const BallPtr& out_ball);
// (Σ a_g g)* = Σ a_g g^-1
GroupRingElement gr_star(const GroupRingElement& a);
Rational l1_norm(const GroupRingElement& a);
Rational augmentation(const GroupRingElement& a);
// Re-index into a larger ball of the same presentation.
GroupRingElement lift(const GroupRingElement& a, const BallPtr& ball);

inline GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b) { return gr_add(a, b); }
inline GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b) { return gr_sub(a, b); }

// "q1*g[i1] + q2*g[i2]"; the zero element is "0".
std::string serialize(const GroupRingElement& a);
GroupRingElement parse_element(const BallPtr& ball, std::string_view text);
// Human-readable form using shortest words, e.g. "2 - t - t^-1".
std::string pretty(const GroupRingElement& a);

class GroupRingMatrix {
 public:
  GroupRingMatrix(std::size_t rows, std::size_t cols, BallPtr ball);

  static GroupRingMatrix identity(std::size_t n, BallPtr ball);
  static GroupRingMatrix scalar(std::size_t n, const GroupRingElement& a);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const BallPtr& ball() const { return ball_; }

  const GroupRingElement& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  // Replaces an entry; the element must belong to a compatible ball.
  void set(std::size_t i, std::size_t j, GroupRingElement value);

  bool is_zero() const;
  int support_radius() const;
  bool operator==(const GroupRingMatrix& other) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  BallPtr ball_;
  std::vector<GroupRingElement> entries_;
};

GroupRingMatrix mat_add(const GroupRingMatrix& a, const GroupRingMatrix& b);
GroupRingMatrix mat_sub(const GroupRingMatrix& a, const GroupRingMatrix& b);
GroupRingMatrix mat_scale(const GroupRingMatrix& a, const Rational& q);
// Ordinary matrix product over QΓ, entries evaluated in parallel.
GroupRingMatrix mat_mul(const GroupRingMatrix& a, const GroupRingMatrix& b, const BallPtr& out_ball);
// Transpose followed by entrywise involution.
GroupRingMatrix mat_star(const GroupRingMatrix& a);
// Plain transpose (no involution).
GroupRingMatrix mat_transpose(const GroupRingMatrix& a);
// max_i Σ_j ‖a_ij‖₁
Rational mat_l1_norm(const GroupRingMatrix& a);
// a·M and M·a for a scalar a ∈ QΓ.
GroupRingMatrix mat_lmul(const GroupRingElement& a, const GroupRingMatrix& m, const BallPtr& out_ball);
GroupRingMatrix mat_rmul(const GroupRingMatrix& m, const GroupRingElement& a, const BallPtr& out_ball);
GroupRingMatrix mat_lift(const GroupRingMatrix& a, const BallPtr& ball);

// "rows cols" header line followed by one serialized entry per line, row-major.
std::string serialize(const GroupRingMatrix& a);
GroupRingMatrix parse_matrix(const BallPtr& ball, std::string_view text);

// Reference kernels kept for testing and benchmarking the parallel ones.
namespace serial {
GroupRingMatrix mat_mul(const GroupRingMatrix& a, const GroupRingMatrix& b, const BallPtr& out_ball);
}  // namespace serial

// Whether two balls index the same group consistently.
bool compatible(const Ball& a, const Ball& b);

}  // namespace tncert
