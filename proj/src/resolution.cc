#include "tncert/resolution.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "tncert/error.h"
#include "tncert/exact_linalg.h"

namespace tncert {

std::string_view origin_name(ComplexOrigin origin) {
  switch (origin) {
    case ComplexOrigin::kPresentationComplex: return "presentation";
    case ComplexOrigin::kCyclicPeriodic: return "cyclic";
    case ComplexOrigin::kUserSupplied: return "user";
  }
  return "user";
}

GroupRingMatrix ChainComplexData::action(int k) const { return mat_transpose(d(k)); }

std::string element_name(const Ball& ball, int index) {
  return index == 0 ? "e" : to_text(*ball.presentation(), ball.word(index));
}

GroupRingElement fox_derivative(const FreeWord& w, int s, const BallPtr& ball) {
  const Presentation& p = *ball->presentation();
  const auto& backend = *p.backend;
  GroupElement prefix = backend.identity();
  std::vector<GroupRingElement::Term> terms;
  auto index_of = [&](const GroupElement& g) {
    auto idx = ball->find(g);
    if (!idx)
      throw Error(ErrorCode::kRadiusTooSmall, "Fox derivative of a word of length " + std::to_string(w.length()) +
                                                  " needs a ball of radius " + std::to_string(w.length()));
    return *idx;
  };
  for (const Letter& l : w.letters) {
    GroupElement gen = backend.generator(l.generator);
    if (l.exponent < 0) gen = backend.inverse(gen);
    GroupElement next = backend.multiply(prefix, gen);
    if (l.generator == s) {
      // ∂(u s)/∂s = ∂u/∂s + u, ∂(u s^-1)/∂s = ∂u/∂s - u s^-1
      if (l.exponent > 0)
        terms.emplace_back(index_of(prefix), Rational(1));
      else
        terms.emplace_back(index_of(next), Rational(-1));
    }
    prefix = std::move(next);
  }
  return GroupRingElement(ball, std::move(terms));
}

namespace {

int max_relator_length(const Presentation& p) {
  std::size_t r = 1;
  for (const auto& w : p.relators) r = std::max(r, w.length());
  return static_cast<int>(r);
}

// Rows of the regular representation of x ↦ x·D on (QΓ)^rows, one sparse
// row per basis vector g·e_j (index j·|Γ| + g).
std::vector<SparseVector> regular_rows(const GroupRingMatrix& D, const Ball& ball) {
  const int n = static_cast<int>(ball.size());
  std::vector<SparseVector> out;
  for (std::size_t j = 0; j < D.rows(); ++j)
    for (int g = 0; g < n; ++g) {
      std::vector<std::pair<int, Rational>> row;
      for (std::size_t l = 0; l < D.cols(); ++l)
        for (const auto& [y, q] : D(j, l).terms())
          row.emplace_back(static_cast<int>(l) * n + product_index(ball, g, y), q);
      std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      SparseVector merged;
      for (auto& [idx, q] : row) {
        if (!merged.empty() && merged.back().first == idx)
          merged.back().second += q;
        else
          merged.emplace_back(idx, q);
        if (merged.back().second == 0) merged.pop_back();
      }
      out.push_back(std::move(merged));
    }
  return out;
}

std::size_t regular_rank(const GroupRingMatrix& D, const Ball& ball) {
  SparseEchelon ech;
  for (auto& row : regular_rows(D, ball)) ech.insert(std::move(row));
  return ech.rank();
}

void require_finite(const ChainComplexData& c) {
  if (!c.ball->complete()) throw Error(ErrorCode::kInvalidArgument, "operation needs a finite group and its full ball");
}

// First nonzero entry of D_{k+1} D_k, or nullopt.
std::optional<std::string> composition_witness(const GroupRingMatrix& upper, const GroupRingMatrix& lower,
                                               const BallPtr& ball, int k) {
  GroupRingMatrix prod = mat_mul(upper, lower, ball);
  for (std::size_t i = 0; i < prod.rows(); ++i)
    for (std::size_t j = 0; j < prod.cols(); ++j)
      if (!prod(i, j).is_zero()) {
        const auto& [g, q] = prod(i, j).terms().front();
        // report in the stored layout: entry (row, col) of d_k d_{k+1}
        return "d_" + std::to_string(k) + " d_" + std::to_string(k + 1) + " entry (" + std::to_string(j) + "," +
               std::to_string(i) + ") has coefficient " + to_string(q) + " at " + element_name(*ball, g);
      }
  return std::nullopt;
}

int entry_radius(const ChainComplexData& c, int k) {
  return k >= 1 && k <= c.top_degree() ? c.d(k).support_radius() : 0;
}

}  // namespace

BallPtr ball_for(const ChainComplexData& c, int radius) {
  if (c.ball->complete() || radius <= c.ball->radius()) return c.ball;
  return enumerate_ball(c.presentation, radius);
}

ChainComplexData build_presentation_complex(const PresentationPtr& p, const BallPtr& ball) {
  if (ball->presentation() != p) throw Error(ErrorCode::kBallMismatch, "ball belongs to another presentation");
  if (!ball->complete() && ball->radius() < max_relator_length(*p))
    throw Error(ErrorCode::kRadiusTooSmall, "presentation complex needs a ball of radius " +
                                                std::to_string(max_relator_length(*p)));
  ChainComplexData c;
  c.presentation = p;
  c.ball = ball;
  c.origin = ComplexOrigin::kPresentationComplex;
  const std::size_t gens = p->rank(), rels = p->relators.size();
  GroupRingMatrix d1(1, gens, ball);
  for (std::size_t s = 0; s < gens; ++s) {
    int idx = ball->edge(0, static_cast<int>(2 * s));
    d1.set(0, s, GroupRingElement::augmentation_generator(ball, idx));
  }
  c.ranks = {1, gens};
  c.differentials.push_back(std::move(d1));
  if (rels > 0) {
    GroupRingMatrix d2(gens, rels, ball);
    for (std::size_t r = 0; r < rels; ++r)
      for (std::size_t s = 0; s < gens; ++s) d2.set(s, r, fox_derivative(p->relators[r], static_cast<int>(s), ball));
    c.ranks.push_back(rels);
    c.differentials.push_back(std::move(d2));
    c.exact_degree = 1;
  } else {
    c.terminal = p->kind == BackendKind::kFree;
    c.exact_degree = c.terminal ? 1 : 0;
  }
  if (ball->complete()) c.exact_degree = exact_degree_finite(c);
  return c;
}

ChainComplexData cyclic_resolution(int n, int top_degree, const BallPtr& ball) {
  const Presentation& p = *ball->presentation();
  if (!ball->complete() || p.kind != BackendKind::kCyclic || p.cyclic_order != n || p.rank() != 1)
    throw Error(ErrorCode::kInvalidArgument, "cyclic resolution needs the full ball of Z/" + std::to_string(n));
  if (top_degree < 1) throw Error(ErrorCode::kInvalidArgument, "top degree must be at least 1");
  ChainComplexData c;
  c.presentation = ball->presentation();
  c.ball = ball;
  c.origin = ComplexOrigin::kCyclicPeriodic;
  c.ranks.assign(static_cast<std::size_t>(top_degree) + 1, 1);
  const int t = ball->edge(0, 0);
  std::vector<GroupRingElement::Term> norm;
  for (std::size_t g = 0; g < ball->size(); ++g) norm.emplace_back(static_cast<int>(g), Rational(1));
  for (int k = 1; k <= top_degree; ++k) {
    GroupRingMatrix dk(1, 1, ball);
    dk.set(0, 0, k % 2 == 1 ? GroupRingElement::augmentation_generator(ball, t) : GroupRingElement(ball, norm));
    c.differentials.push_back(std::move(dk));
  }
  c.exact_degree = exact_degree_finite(c);
  return c;
}

ChainComplexData attach_user_differential(const ChainComplexData& c, int k, const GroupRingMatrix& dk) {
  if (k != c.top_degree() + 1)
    throw Error(ErrorCode::kInvalidArgument, "can only attach d_" + std::to_string(c.top_degree() + 1));
  if (dk.rows() != c.ranks.back())
    throw Error(ErrorCode::kShapeMismatch, "d_" + std::to_string(k) + " must have " + std::to_string(c.ranks.back()) +
                                               " rows, got " + std::to_string(dk.rows()));
  if (!compatible(*dk.ball(), *c.ball)) throw Error(ErrorCode::kBallMismatch, "differential over another group");
  const int radius = dk.support_radius() + entry_radius(c, k - 1);
  if (!c.ball->complete() && dk.support_radius() > c.ball->radius())
    throw Error(ErrorCode::kRadiusTooSmall, "differential leaves the complex ball");
  GroupRingMatrix stored = mat_lift(dk, c.ball);
  if (auto w = composition_witness(mat_transpose(stored), c.action(k - 1), ball_for(c, radius), k - 1))
    throw Error(ErrorCode::kNotAComplex, *w);
  ChainComplexData out = c;
  out.ranks.push_back(dk.cols());
  out.differentials.push_back(std::move(stored));
  out.origin = ComplexOrigin::kUserSupplied;
  out.terminal = false;
  if (out.ball->complete()) out.exact_degree = exact_degree_finite(out);
  return out;
}

int exact_degree_finite(const ChainComplexData& c) {
  require_finite(c);
  const std::size_t order = c.ball->size();
  std::vector<std::size_t> ranks;  // ranks[k] = rank of x ↦ x·D_k
  ranks.push_back(0);
  for (int k = 1; k <= c.top_degree(); ++k) ranks.push_back(regular_rank(c.action(k), *c.ball));
  if (c.top_degree() < 1 || ranks[1] != order - 1) return -1;
  int exact = 0;
  for (int k = 1; k <= c.top_degree(); ++k) {
    std::size_t kernel = order * c.ranks[k] - ranks[k];
    std::size_t image = k < c.top_degree() ? ranks[k + 1] : 0;
    if (k == c.top_degree() && !c.terminal) break;
    if (kernel != image) break;
    exact = k;
  }
  return exact;
}

ChainComplexData extend_finite_resolution(const ChainComplexData& c, int top_degree) {
  require_finite(c);
  ChainComplexData out = c;
  const Ball& ball = *c.ball;
  const int n = static_cast<int>(ball.size());
  while (out.top_degree() < top_degree && !out.terminal) {
    const int K = out.top_degree();
    const std::size_t mk = out.ranks[K], mk1 = out.ranks[K - 1];
    RationalMatrix rep(mk * n, mk1 * n);
    auto rows = regular_rows(out.action(K), ball);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& [col, q] : rows[r]) rep(r, col) = q;
    auto kernel = kernel_basis(transpose(rep));
    // Greedy QΓ-generators of the kernel: keep a vector only when its orbit
    // under left translation is not yet spanned.
    SparseEchelon span;
    std::vector<std::vector<Rational>> generators;
    for (auto& v : kernel) {
      SparseVector sv;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) sv.emplace_back(static_cast<int>(i), v[i]);
      if (span.contains(sv)) continue;
      // clear denominators and common factors
      mpz_class den = 1, num = 0;
      for (const auto& [i, q] : sv) den = lcm(den, mpz_class(q.get_den()));
      for (const auto& [i, q] : sv) num = gcd(num, mpz_class(q.get_num()));
      for (auto& x : v) x = x * Rational(den) / Rational(num);
      for (int gamma = 0; gamma < n; ++gamma) {
        SparseVector t;
        for (std::size_t j = 0; j < mk; ++j)
          for (int h = 0; h < n; ++h)
            if (v[j * n + h] != 0) t.emplace_back(static_cast<int>(j) * n + product_index(ball, gamma, h), v[j * n + h]);
        std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        span.insert(std::move(t));
      }
      generators.push_back(v);
    }
    if (generators.empty()) {
      out.terminal = true;
      break;
    }
    GroupRingMatrix next(mk, generators.size(), c.ball);
    for (std::size_t r = 0; r < generators.size(); ++r)
      for (std::size_t j = 0; j < mk; ++j) {
        std::vector<GroupRingElement::Term> terms;
        for (int h = 0; h < n; ++h)
          if (generators[r][j * n + h] != 0) terms.emplace_back(h, generators[r][j * n + h]);
        next.set(j, r, GroupRingElement(c.ball, std::move(terms)));
      }
    out.ranks.push_back(generators.size());
    out.differentials.push_back(std::move(next));
  }
  out.exact_degree = exact_degree_finite(out);
  return out;
}

int laplacian_radius(const ChainComplexData& c, int k) {
  return 2 * std::max(entry_radius(c, k), entry_radius(c, k + 1));
}

LaplacianMatrix laplacian(const ChainComplexData& c, int k, const BallPtr& out_ball) {
  if (k < 0 || k > c.top_degree())
    throw Error(ErrorCode::kInvalidArgument, "degree " + std::to_string(k) + " is outside the complex (top degree " +
                                                 std::to_string(c.top_degree()) + ")");
  const std::size_t m = c.ranks[k];
  LaplacianMatrix out{k, GroupRingMatrix(m, m, out_ball), 0, false};
  if (k >= 1) {
    GroupRingMatrix D = c.action(k);
    out.matrix = mat_add(out.matrix, mat_mul(D, mat_star(D), out_ball));
  }
  if (k + 1 <= c.top_degree()) {
    GroupRingMatrix D = c.action(k + 1);
    out.matrix = mat_add(out.matrix, mat_mul(mat_star(D), D, out_ball));
  } else {
    out.truncated = !c.terminal;
  }
  out.matrix = mat_lift(out.matrix, out_ball);
  out.support_radius = out.matrix.support_radius();
  return out;
}

LaplacianMatrix laplacian(const ChainComplexData& c, int k) {
  return laplacian(c, k, ball_for(c, laplacian_radius(c, k)));
}

bool ComplexReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.passed; });
}

std::string ComplexReport::to_text() const {
  std::string out;
  for (const auto& i : items) {
    out += (i.passed ? "ok    " : "FAIL  ") + i.name;
    if (!i.witness.empty()) out += ": " + i.witness;
    out += '\n';
  }
  return out;
}

ComplexReport check_complex(const ChainComplexData& c) {
  ComplexReport report;
  const Presentation& p = *c.presentation;
  if (c.ranks.size() != c.differentials.size() + 1 || c.ranks.empty() || c.ranks[0] != 1)
    report.items.push_back({"ranks", false, "expected m_0 = 1 and one rank per differential"});
  for (int k = 1; k <= c.top_degree(); ++k) {
    const auto& dk = c.d(k);
    if (dk.rows() != c.ranks[k - 1] || dk.cols() != c.ranks[k])
      report.items.push_back({"shape of d_" + std::to_string(k), false,
                              std::to_string(dk.rows()) + "x" + std::to_string(dk.cols())});
  }
  if (!report.ok()) return report;

  if (c.top_degree() >= 1) {
    CheckItem aug{"augmentation of d_1 vanishes", true, ""};
    for (std::size_t s = 0; s < c.ranks[1] && aug.passed; ++s)
      if (augmentation(c.d(1)(0, s)) != 0) {
        aug.passed = false;
        aug.witness = "column " + std::to_string(s) + " has augmentation " + to_string(augmentation(c.d(1)(0, s)));
      }
    report.items.push_back(aug);
  }
  if (c.origin == ComplexOrigin::kPresentationComplex && c.top_degree() >= 1) {
    CheckItem cols{"d_1 column s equals s - e", c.ranks[1] == p.rank(), ""};
    for (std::size_t s = 0; s < c.ranks[1] && cols.passed; ++s) {
      auto expect = GroupRingElement::augmentation_generator(c.ball, c.ball->edge(0, static_cast<int>(2 * s)));
      if (!(c.d(1)(0, s) == expect)) {
        cols.passed = false;
        cols.witness = "column " + std::to_string(s) + " is " + pretty(c.d(1)(0, s));
      }
    }
    report.items.push_back(cols);
  }
  for (int k = 1; k < c.top_degree(); ++k) {
    CheckItem item{"d_" + std::to_string(k) + " d_" + std::to_string(k + 1) + " = 0", true, ""};
    BallPtr ball = ball_for(c, entry_radius(c, k) + entry_radius(c, k + 1));
    if (auto w = composition_witness(c.action(k + 1), c.action(k), ball, k)) {
      item.passed = false;
      item.witness = *w;
    }
    report.items.push_back(item);
  }
  if (c.origin == ComplexOrigin::kPresentationComplex && c.top_degree() >= 2) {
    // Fundamental identity Σ_s (∂r/∂s)(s - 1) = r - 1 in the free group ring,
    // plus agreement of d_2 with the Fox derivatives evaluated in Γ.
    Presentation free;
    free.generators = p.generators;
    free.kind = BackendKind::kFree;
    auto fp = make_presentation(free);
    auto fball = enumerate_ball(fp, max_relator_length(p) + 1);
    for (std::size_t r = 0; r < p.relators.size(); ++r) {
      const FreeWord& w = p.relators[r];
      CheckItem item{"Fox identity for relator " + to_text(p, w), true, ""};
      GroupRingElement lhs(fball);
      for (std::size_t s = 0; s < p.rank(); ++s) {
        auto gen = GroupRingElement::augmentation_generator(fball, fball->edge(0, static_cast<int>(2 * s)));
        lhs = lhs + gr_mul(fox_derivative(w, static_cast<int>(s), fball), gen, fball);
      }
      auto rel = fball->find(eval_word(*fp, w));
      GroupRingElement rhs = GroupRingElement::monomial(fball, *rel) - GroupRingElement::identity(fball);
      GroupRingElement diff = lhs - rhs;
      if (!diff.is_zero()) {
        item.passed = false;
        item.witness = "difference has coefficient " + to_string(diff.terms().front().second) + " at " +
                       element_name(*fball, diff.terms().front().first);
      }
      for (std::size_t s = 0; s < p.rank() && item.passed && r < c.ranks[2]; ++s) {
        auto expect = fox_derivative(w, static_cast<int>(s), c.ball);
        GroupRingElement delta = c.d(2)(s, r) - expect;
        if (!delta.is_zero()) {
          item.passed = false;
          item.witness = "d_2 entry (" + std::to_string(s) + "," + std::to_string(r) + ") differs from the Fox derivative by " +
                         to_string(delta.terms().front().second) + " at " +
                         element_name(*c.ball, delta.terms().front().first);
        }
      }
      report.items.push_back(item);
    }
  }
  return report;
}

std::string serialize(const ChainComplexData& c) {
  std::ostringstream out;
  out << "tncert-complex 1\n";
  out << "origin " << origin_name(c.origin) << '\n';
  out << "terminal " << (c.terminal ? 1 : 0) << '\n';
  out << "exact-degree " << c.exact_degree << '\n';
  out << "presentation\n" << to_text(*c.presentation) << "end-presentation\n";
  out << "ball-radius ";
  if (c.ball->complete())
    out << "full";
  else
    out << c.ball->radius();
  out << '\n';
  out << "ranks";
  for (auto r : c.ranks) out << ' ' << r;
  out << '\n';
  for (int k = 1; k <= c.top_degree(); ++k) {
    const auto& dk = c.d(k);
    for (std::size_t i = 0; i < dk.rows(); ++i)
      for (std::size_t j = 0; j < dk.cols(); ++j)
        if (!dk(i, j).is_zero()) out << "d " << k << ' ' << i << ' ' << j << ' ' << serialize(dk(i, j)) << '\n';
  }
  out << "end\n";
  return out.str();
}

ChainComplexData parse_complex(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, std::string("complex file ends before ") + what);
    return line;
  };
  auto field = [&](const std::string& key) {
    next(key.c_str());
    if (line.rfind(key + " ", 0) != 0) throw Error(ErrorCode::kParseError, "expected '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
  };
  if (next("header") != "tncert-complex 1") throw Error(ErrorCode::kParseError, "not a complex file");
  ChainComplexData c;
  std::string origin = field("origin");
  if (origin == "presentation")
    c.origin = ComplexOrigin::kPresentationComplex;
  else if (origin == "cyclic")
    c.origin = ComplexOrigin::kCyclicPeriodic;
  else if (origin == "user")
    c.origin = ComplexOrigin::kUserSupplied;
  else
    throw Error(ErrorCode::kParseError, "unknown origin '" + origin + "'");
  std::string terminal = field("terminal");
  if (terminal != "0" && terminal != "1") throw Error(ErrorCode::kParseError, "terminal must be 0 or 1");
  c.terminal = terminal == "1";
  try {
    c.exact_degree = std::stoi(field("exact-degree"));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kParseError, "bad exact-degree");
  }
  if (next("presentation") != "presentation") throw Error(ErrorCode::kParseError, "expected 'presentation'");
  std::string pres;
  while (next("end-presentation") != "end-presentation") pres += line + '\n';
  c.presentation = parse_presentation(pres);
  std::string radius = field("ball-radius");
  try {
    c.ball = enumerate_ball(c.presentation, radius == "full" ? Ball::kFull : std::stoi(radius));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kParseError, "bad ball-radius '" + radius + "'");
  }
  {
    std::istringstream ranks(field("ranks"));
    std::size_t r;
    while (ranks >> r) c.ranks.push_back(r);
    if (c.ranks.empty() || !ranks.eof()) throw Error(ErrorCode::kParseError, "bad ranks line");
  }
  for (std::size_t k = 1; k < c.ranks.size(); ++k)
    c.differentials.emplace_back(c.ranks[k - 1], c.ranks[k], c.ball);
  while (next("end") != "end") {
    std::istringstream ls(line);
    std::string tag;
    int k;
    std::size_t i, j;
    if (!(ls >> tag >> k >> i >> j) || tag != "d" || k < 1 || k > c.top_degree() || i >= c.ranks[k - 1] ||
        j >= c.ranks[k])
      throw Error(ErrorCode::kParseError, "bad differential line '" + line + "'");
    std::string rest;
    std::getline(ls, rest);
    c.differentials[k - 1].set(i, j, parse_element(c.ball, rest));
  }
  return c;
}

std::string fingerprint(const ChainComplexData& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tncert
