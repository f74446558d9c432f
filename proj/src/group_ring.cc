#include "tncert/group_ring.h"

#include <algorithm>
#include <regex>
#include <sstream>

#include "tncert/error.h"

namespace tncert {

bool compatible(const Ball& a, const Ball& b) { return a.presentation() == b.presentation(); }

namespace {

const BallPtr& larger(const BallPtr& a, const BallPtr& b) {
  if (!compatible(*a, *b)) throw Error(ErrorCode::kBallMismatch, "elements live over different presentations");
  return a->size() >= b->size() ? a : b;
}

void normalize(std::vector<GroupRingElement::Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<GroupRingElement::Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().first == t.first)
      out.back().second += t.second;
    else
      out.push_back(std::move(t));
    if (out.back().second == 0) out.pop_back();
  }
  terms = std::move(out);
}

}  // namespace

GroupRingElement::GroupRingElement(BallPtr ball, std::vector<Term> terms) : ball_(std::move(ball)), terms_(std::move(terms)) {
  normalize(terms_);
  for (const auto& [idx, q] : terms_)
    if (idx < 0 || static_cast<std::size_t>(idx) >= ball_->size())
      throw Error(ErrorCode::kBallMismatch, "element index " + std::to_string(idx) + " outside the ambient ball");
}

GroupRingElement GroupRingElement::monomial(BallPtr ball, int index, const Rational& coeff) {
  return GroupRingElement(std::move(ball), {{index, coeff}});
}

GroupRingElement GroupRingElement::augmentation_generator(BallPtr ball, int index) {
  return GroupRingElement(std::move(ball), {{index, Rational(1)}, {0, Rational(-1)}});
}

Rational GroupRingElement::coeff(int index) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index, [](const Term& t, int i) { return t.first < i; });
  return it != terms_.end() && it->first == index ? it->second : Rational(0);
}

int GroupRingElement::support_radius() const {
  int r = 0;
  for (const auto& [idx, q] : terms_) r = std::max(r, ball_->word_length(idx));
  return r;
}

bool GroupRingElement::operator==(const GroupRingElement& other) const {
  return compatible(*ball_, *other.ball_) && terms_ == other.terms_;
}

GroupRingElement gr_add(const GroupRingElement& a, const GroupRingElement& b) {
  const BallPtr& ball = larger(a.ball(), b.ball());
  std::vector<GroupRingElement::Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return GroupRingElement(ball, std::move(terms));
}

GroupRingElement gr_scale(const GroupRingElement& a, const Rational& q) {
  std::vector<GroupRingElement::Term> terms;
  if (q != 0)
    for (const auto& [idx, c] : a.terms()) terms.emplace_back(idx, c * q);
  return GroupRingElement(a.ball(), std::move(terms));
}

GroupRingElement gr_sub(const GroupRingElement& a, const GroupRingElement& b) { return gr_add(a, gr_scale(b, -1)); }

GroupRingElement gr_mul(const GroupRingElement& a, const GroupRingElement& b, const BallPtr& out_ball) {
  if (!compatible(*a.ball(), *out_ball) || !compatible(*b.ball(), *out_ball))
    throw Error(ErrorCode::kBallMismatch, "product over different presentations");
  if (a.is_zero() || b.is_zero()) return GroupRingElement(out_ball);
  if (!out_ball->complete() && a.support_radius() + b.support_radius() > out_ball->radius())
    throw Error(ErrorCode::kRadiusTooSmall, "product needs radius " +
                                                std::to_string(a.support_radius() + b.support_radius()) +
                                                " but the output ball has radius " + std::to_string(out_ball->radius()));
  const auto& backend = *out_ball->presentation()->backend;
  std::vector<GroupRingElement::Term> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& [x, qa] : a.terms()) {
    const GroupElement& gx = a.ball()->element(x);
    for (const auto& [y, qb] : b.terms()) {
      int xy;
      if (static_cast<std::size_t>(std::max(x, y)) < out_ball->size()) {
        xy = product_index(*out_ball, x, y);
      } else {
        auto found = out_ball->find(backend.multiply(gx, b.ball()->element(y)));
        if (!found) throw Error(ErrorCode::kRadiusTooSmall, "product left the output ball");
        xy = *found;
      }
      terms.emplace_back(xy, qa * qb);
    }
  }
  return GroupRingElement(out_ball, std::move(terms));
}

GroupRingElement gr_star(const GroupRingElement& a) {
  std::vector<GroupRingElement::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& [idx, q] : a.terms()) terms.emplace_back(a.ball()->inverse(idx), q);
  return GroupRingElement(a.ball(), std::move(terms));
}

Rational l1_norm(const GroupRingElement& a) {
  Rational s = 0;
  for (const auto& [idx, q] : a.terms()) s += abs(q);
  return s;
}

Rational augmentation(const GroupRingElement& a) {
  Rational s = 0;
  for (const auto& [idx, q] : a.terms()) s += q;
  return s;
}

GroupRingElement lift(const GroupRingElement& a, const BallPtr& ball) {
  if (!compatible(*a.ball(), *ball)) throw Error(ErrorCode::kBallMismatch, "lift across presentations");
  return GroupRingElement(ball, a.terms());
}

std::string serialize(const GroupRingElement& a) {
  if (a.is_zero()) return "0";
  std::string out;
  for (const auto& [idx, q] : a.terms()) {
    if (!out.empty()) out += " + ";
    out += to_string(q) + "*g[" + std::to_string(idx) + "]";
  }
  return out;
}

GroupRingElement parse_element(const BallPtr& ball, std::string_view text) {
  std::string s(text);
  static const std::regex term(R"(^\s*([+-]?\s*[0-9]+(?:/[0-9]+)?)\s*\*\s*g\[(\d+)\]\s*$)");
  std::vector<GroupRingElement::Term> terms;
  std::string trimmed = std::regex_replace(s, std::regex(R"(^\s+|\s+$)"), "");
  if (trimmed == "0") return GroupRingElement(ball);
  // split on '+' that separate terms (a leading '-' belongs to the coefficient)
  std::vector<std::string> pieces;
  std::string cur;
  for (char c : trimmed) {
    if (c == '+' && !cur.empty() && cur.find_first_not_of(" \t") != std::string::npos) {
      pieces.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  pieces.push_back(cur);
  for (const auto& piece : pieces) {
    std::smatch m;
    if (!std::regex_match(piece, m, term)) throw Error(ErrorCode::kParseError, "bad group ring term '" + piece + "'");
    std::string coeff = std::regex_replace(m[1].str(), std::regex(R"(\s+)"), "");
    long idx = std::stol(m[2].str());
    if (idx < 0 || static_cast<std::size_t>(idx) >= ball->size())
      throw Error(ErrorCode::kParseError, "element index " + m[2].str() + " outside the ball");
    terms.emplace_back(static_cast<int>(idx), parse_rational(coeff));
  }
  return GroupRingElement(ball, std::move(terms));
}

std::string pretty(const GroupRingElement& a) {
  if (a.is_zero()) return "0";
  const Presentation& p = *a.ball()->presentation();
  std::string out;
  for (const auto& [idx, q] : a.terms()) {
    bool negative = q < 0;
    Rational mag = abs(q);
    std::string word = idx == 0 ? "" : to_text(p, a.ball()->word(idx));
    std::string body;
    if (word.empty())
      body = to_string(mag);
    else if (mag == 1)
      body = word;
    else
      body = to_string(mag) + (word.find(' ') != std::string::npos ? "(" + word + ")" : word);
    if (out.empty())
      out = (negative ? "-" : "") + body;
    else
      out += (negative ? " - " : " + ") + body;
  }
  return out;
}

// ------------------------------------------------------------------ matrices

GroupRingMatrix::GroupRingMatrix(std::size_t rows, std::size_t cols, BallPtr ball)
    : rows_(rows), cols_(cols), ball_(ball), entries_(rows * cols, GroupRingElement(ball)) {}

GroupRingMatrix GroupRingMatrix::identity(std::size_t n, BallPtr ball) {
  GroupRingMatrix m(n, n, ball);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, GroupRingElement::identity(ball));
  return m;
}

GroupRingMatrix GroupRingMatrix::scalar(std::size_t n, const GroupRingElement& a) {
  GroupRingMatrix m(n, n, a.ball());
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, a);
  return m;
}

void GroupRingMatrix::set(std::size_t i, std::size_t j, GroupRingElement value) {
  if (!compatible(*value.ball(), *ball_)) throw Error(ErrorCode::kBallMismatch, "matrix entry over another presentation");
  if (value.ball()->size() > ball_->size()) {
    for (const auto& [idx, q] : value.terms())
      if (static_cast<std::size_t>(idx) >= ball_->size())
        throw Error(ErrorCode::kRadiusTooSmall, "matrix entry outside the matrix ball");
  }
  entries_[i * cols_ + j] = GroupRingElement(ball_, value.terms());
}

bool GroupRingMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
}

int GroupRingMatrix::support_radius() const {
  int r = 0;
  for (const auto& e : entries_) r = std::max(r, e.support_radius());
  return r;
}

bool GroupRingMatrix::operator==(const GroupRingMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && entries_ == other.entries_;
}

namespace {

void require_same_shape(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::kShapeMismatch, std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                                               std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

GroupRingElement product_entry(const GroupRingMatrix& a, const GroupRingMatrix& b, std::size_t i, std::size_t j,
                               const BallPtr& out_ball) {
  std::vector<GroupRingElement::Term> terms;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
    auto p = gr_mul(a(i, k), b(k, j), out_ball);
    terms.insert(terms.end(), p.terms().begin(), p.terms().end());
  }
  return GroupRingElement(out_ball, std::move(terms));
}

void require_product_shape(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::kShapeMismatch, "cannot multiply " + std::to_string(a.rows()) + "x" +
                                               std::to_string(a.cols()) + " by " + std::to_string(b.rows()) + "x" +
                                               std::to_string(b.cols()));
}

}  // namespace

GroupRingMatrix mat_add(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  require_same_shape(a, b);
  GroupRingMatrix out(a.rows(), a.cols(), larger(a.ball(), b.ball()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, gr_add(a(i, j), b(i, j)));
  return out;
}

GroupRingMatrix mat_sub(const GroupRingMatrix& a, const GroupRingMatrix& b) { return mat_add(a, mat_scale(b, -1)); }

GroupRingMatrix mat_scale(const GroupRingMatrix& a, const Rational& q) {
  GroupRingMatrix out(a.rows(), a.cols(), a.ball());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, gr_scale(a(i, j), q));
  return out;
}

GroupRingMatrix mat_mul(const GroupRingMatrix& a, const GroupRingMatrix& b, const BallPtr& out_ball) {
  require_product_shape(a, b);
  const std::size_t rows = a.rows(), cols = b.cols();
  std::vector<GroupRingElement> entries(rows * cols, GroupRingElement(out_ball));
  // Exact arithmetic: the result does not depend on the schedule.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t idx = 0; idx < rows * cols; ++idx) {
    try {
      entries[idx] = product_entry(a, b, idx / cols, idx % cols, out_ball);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  GroupRingMatrix out(rows, cols, out_ball);
  for (std::size_t idx = 0; idx < rows * cols; ++idx) out.set(idx / cols, idx % cols, std::move(entries[idx]));
  return out;
}

namespace serial {

GroupRingMatrix mat_mul(const GroupRingMatrix& a, const GroupRingMatrix& b, const BallPtr& out_ball) {
  require_product_shape(a, b);
  GroupRingMatrix out(a.rows(), b.cols(), out_ball);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out.set(i, j, product_entry(a, b, i, j, out_ball));
  return out;
}

}  // namespace serial

GroupRingMatrix mat_star(const GroupRingMatrix& a) {
  GroupRingMatrix out(a.cols(), a.rows(), a.ball());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(j, i, gr_star(a(i, j)));
  return out;
}

GroupRingMatrix mat_transpose(const GroupRingMatrix& a) {
  GroupRingMatrix out(a.cols(), a.rows(), a.ball());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(j, i, a(i, j));
  return out;
}

Rational mat_l1_norm(const GroupRingMatrix& a) {
  Rational best = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Rational row = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) row += l1_norm(a(i, j));
    if (row > best) best = row;
  }
  return best;
}

GroupRingMatrix mat_lmul(const GroupRingElement& a, const GroupRingMatrix& m, const BallPtr& out_ball) {
  GroupRingMatrix out(m.rows(), m.cols(), out_ball);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.set(i, j, gr_mul(a, m(i, j), out_ball));
  return out;
}

GroupRingMatrix mat_rmul(const GroupRingMatrix& m, const GroupRingElement& a, const BallPtr& out_ball) {
  GroupRingMatrix out(m.rows(), m.cols(), out_ball);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.set(i, j, gr_mul(m(i, j), a, out_ball));
  return out;
}

GroupRingMatrix mat_lift(const GroupRingMatrix& a, const BallPtr& ball) {
  GroupRingMatrix out(a.rows(), a.cols(), ball);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a(i, j));
  return out;
}

std::string serialize(const GroupRingMatrix& a) {
  std::ostringstream out;
  out << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out << serialize(a(i, j)) << '\n';
  return out.str();
}

GroupRingMatrix parse_matrix(const BallPtr& ball, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw Error(ErrorCode::kParseError, "matrix header");
  std::string line;
  std::getline(in, line);
  GroupRingMatrix m(rows, cols, ball);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "matrix is truncated");
      m.set(i, j, parse_element(ball, line));
    }
  return m;
}

}  // namespace tncert
