#include "tncert/sos.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "tncert/error.h"

namespace tncert {

std::string_view mode_name(SOSKind kind) {
  switch (kind) {
    case SOSKind::kOzawa: return "ozawa";
    case SOSKind::kBracket: return "bracket";
    case SOSKind::kParen: return "paren";
  }
  return "ozawa";
}

SOSKind parse_mode_name(std::string_view name) {
  if (name == "ozawa") return SOSKind::kOzawa;
  if (name == "bracket") return SOSKind::kBracket;
  if (name == "paren") return SOSKind::kParen;
  throw Error(ErrorCode::kParseError, "unknown mode '" + std::string(name) + "'");
}

namespace {

std::string subscript(int k) {
  static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string s = std::to_string(k), out;
  for (char ch : s) out += digits[ch - '0'];
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string mode_formula(SOSMode mode, const std::string& epsilon) {
  std::string dk = "Δ" + subscript(mode.degree);
  switch (mode.kind) {
    case SOSKind::kOzawa: return "Δ₀(Δ₀ − " + epsilon + ")";
    case SOSKind::kBracket: return dk + " − " + epsilon;
    case SOSKind::kParen: return "Δ₀(" + dk + " − " + epsilon + ")Δ₀";
  }
  return "";
}

std::vector<std::pair<int, Rational>> SupportBasis::terms(std::size_t p) const {
  int g = entries[p].element;
  if (!ideal) return {{g, Rational(1)}};
  return {{0, Rational(-1)}, {g, Rational(1)}};
}

SupportBasis build_support_basis(const Ball& ball_d, SOSMode mode, std::size_t m) {
  SupportBasis b;
  b.ideal = mode.ideal();
  b.half_radius = ball_d.radius();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t g = b.ideal ? 1 : 0; g < ball_d.size(); ++g)
      b.entries.push_back({static_cast<int>(g), static_cast<int>(j)});
  return b;
}

bool SOSProblem::degenerate() const {
  return std::all_of(constraints.begin(), constraints.end(), [](const Constraint& c) { return c.c1 == 0; });
}

void validate_mode(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt) {
  if (c.top_degree() < 1) throw Error(ErrorCode::kInvalidArgument, "complex has no differentials");
  if (mode.kind == SOSKind::kOzawa) {
    if (mode.degree != 0) throw Error(ErrorCode::kInvalidArgument, "ozawa mode has no degree");
    return;
  }
  if (mode.degree < 0 || (mode.degree == 0 && (mode.kind == SOSKind::kBracket || !opt.allow_paren_zero)))
    throw Error(ErrorCode::kInvalidArgument, std::string(mode_name(mode.kind)) + " mode needs degree >= 1");
  if (mode.degree > c.top_degree())
    throw Error(ErrorCode::kInvalidArgument, "degree " + std::to_string(mode.degree) +
                                                 " exceeds the top degree of the complex (" +
                                                 std::to_string(c.top_degree()) + ")");
  if (mode.degree > c.exact_degree && !opt.assert_resolution)
    throw Error(ErrorCode::kTruncatedDegree,
                "the complex is only known to be exact through degree " + std::to_string(c.exact_degree) +
                    "; pass --assert-resolution to certify degree " + std::to_string(mode.degree) + " anyway");
}

Target build_target(const ChainComplexData& c, SOSMode mode) {
  LaplacianMatrix l0 = laplacian(c, 0);
  const GroupRingElement& d0 = l0.matrix(0, 0);
  if (mode.kind == SOSKind::kOzawa) {
    BallPtr ball = ball_for(c, 2 * l0.support_radius);
    GroupRingMatrix c0 = GroupRingMatrix::scalar(1, gr_mul(d0, d0, ball));
    GroupRingMatrix c1 = mat_lift(mat_scale(l0.matrix, -1), ball);
    int radius = std::max(c0.support_radius(), c1.support_radius());
    return {c0, c1, radius, false, 2 * l1_norm(d0)};
  }
  LaplacianMatrix lk = laplacian(c, mode.degree);
  const std::size_t m = lk.matrix.rows();
  if (mode.kind == SOSKind::kBracket) {
    GroupRingMatrix c1 = mat_scale(GroupRingMatrix::identity(m, lk.matrix.ball()), -1);
    return {lk.matrix, c1, lk.support_radius, lk.truncated, 2 * mat_l1_norm(lk.matrix)};
  }
  BallPtr ball = ball_for(c, lk.support_radius + 2 * l0.support_radius);
  GroupRingMatrix c0 = mat_rmul(mat_lmul(d0, lk.matrix, ball), d0, ball);
  GroupRingMatrix c1 = GroupRingMatrix::scalar(m, gr_scale(gr_mul(d0, d0, ball), -1));
  int radius = std::max(c0.support_radius(), c1.support_radius());
  return {c0, c1, radius, lk.truncated, 2 * mat_l1_norm(lk.matrix)};
}

int default_half_radius(const ChainComplexData& c, SOSMode mode) {
  return (build_target(c, mode).radius + 1) / 2;
}

namespace {

struct RawTerm {
  ConstraintId id;
  int p, q;
  Rational coeff;
};

bool canonical(const Ball& ball, int i, int j, int g) { return i < j || (i == j && g <= ball.inverse(g)); }

// Contributions of the ordered pairs (p, q) for one p.
std::vector<RawTerm> gram_row(const SupportBasis& basis, const Ball& b2d, std::size_t p) {
  std::vector<RawTerm> out;
  auto tp = basis.terms(p);
  const int i = basis.entries[p].row;
  for (std::size_t q = 0; q < basis.size(); ++q) {
    const int j = basis.entries[q].row;
    if (i > j) continue;
    auto tq = basis.terms(q);
    for (const auto& [x, a] : tp)
      for (const auto& [y, b] : tq) {
        int g = product_index(b2d, b2d.inverse(x), y);
        if (!canonical(b2d, i, j, g)) continue;
        out.push_back({{i, j, g}, static_cast<int>(std::min(p, q)), static_cast<int>(std::max(p, q)), a * b});
      }
  }
  return out;
}

SOSProblem encode_impl(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt, bool parallel) {
  validate_mode(c, mode, opt);
  Target target = build_target(c, mode);
  const int dmin = (target.radius + 1) / 2;
  int d = opt.half_radius.value_or(dmin);
  if (d < 0) throw Error(ErrorCode::kInvalidArgument, "negative half radius");
  BallPtr bd = enumerate_ball(c.presentation, d);
  if (bd->complete()) {
    // radii beyond the diameter of a finite group describe the same basis
    int diameter = enumerate_ball(c.presentation, Ball::kFull)->radius();
    if (d > diameter) bd = enumerate_ball(c.presentation, d = diameter);
  }
  BallPtr b2d = enumerate_ball(c.presentation, 2 * d);
  auto too_small = [&](int need) {
    return Error(ErrorCode::kRadiusTooSmall, "no certificate at radius " + std::to_string(d) +
                                                 ": the target needs half radius at least " + std::to_string(need));
  };
  if (!b2d->complete() && 2 * d < target.radius) throw too_small(dmin);

  SOSProblem prob;
  prob.mode = mode;
  prob.module_rank = target.c0.rows();
  prob.basis = build_support_basis(*bd, mode, prob.module_rank);
  prob.basis.half_radius = d;
  prob.epsilon_cap = target.epsilon_cap;
  prob.fingerprint = fingerprint(c);
  prob.truncated = target.truncated;

  const std::size_t n = prob.basis.size();
  std::vector<std::vector<RawTerm>> rows(n);
  if (parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t p = 0; p < n; ++p) {
      try {
        rows[p] = gram_row(prob.basis, *b2d, p);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t p = 0; p < n; ++p) rows[p] = gram_row(prob.basis, *b2d, p);
  }

  std::map<ConstraintId, std::map<std::pair<int, int>, Rational>> table;
  for (const auto& row : rows)
    for (const auto& t : row) table[t.id][{t.p, t.q}] += t.coeff;

  std::map<ConstraintId, std::pair<Rational, Rational>> rhs;
  for (std::size_t i = 0; i < prob.module_rank; ++i)
    for (std::size_t j = i; j < prob.module_rank; ++j)
      for (int which = 0; which < 2; ++which) {
        const GroupRingElement& e = which == 0 ? target.c0(i, j) : target.c1(i, j);
        for (const auto& [g, q] : e.terms()) {
          if (static_cast<std::size_t>(g) >= b2d->size()) throw too_small(std::max(dmin, d + 1));
          if (!canonical(*b2d, static_cast<int>(i), static_cast<int>(j), g)) continue;
          auto& slot = rhs[{static_cast<int>(i), static_cast<int>(j), g}];
          (which == 0 ? slot.first : slot.second) = q;
        }
      }

  for (auto& [id, terms] : table) {
    Constraint con;
    con.id = id;
    for (auto& [pq, coeff] : terms)
      if (coeff != 0) con.terms.push_back({pq.first, pq.second, coeff});
    if (auto it = rhs.find(id); it != rhs.end()) {
      con.c0 = it->second.first;
      con.c1 = it->second.second;
    }
    if (con.terms.empty() && con.c0 == 0 && con.c1 == 0) continue;
    if (con.terms.empty()) throw too_small(d + 1);
    prob.constraints.push_back(std::move(con));
  }
  for (const auto& [id, value] : rhs)
    if (!table.count(id) && (value.first != 0 || value.second != 0)) throw too_small(std::max(dmin, d + 1));
  return prob;
}

}  // namespace

SOSProblem encode(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt) {
  return encode_impl(c, mode, opt, true);
}

namespace serial {
SOSProblem encode(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt) {
  return encode_impl(c, mode, opt, false);
}
}  // namespace serial

// Layout: block 1 is the Gram matrix, blocks 2 and 3 hold ε = ε⁺ − ε⁻.
// Exact data rides along in '*' comment lines so that import is lossless.
std::string export_sdpa(const SOSProblem& p) {
  std::ostringstream out;
  out << "* tncert-sdpa 1\n";
  out << "* mode " << mode_name(p.mode.kind) << ' ' << p.mode.degree << '\n';
  out << "* module-rank " << p.module_rank << '\n';
  out << "* half-radius " << p.basis.half_radius << '\n';
  out << "* basis " << (p.basis.ideal ? "ideal" : "group") << ' ' << p.basis.size() << '\n';
  for (const auto& e : p.basis.entries) out << "* b " << e.element << ' ' << e.row << '\n';
  out << "* epsilon-cap " << to_string(p.epsilon_cap) << '\n';
  out << "* fingerprint " << p.fingerprint << '\n';
  out << "* convention " << p.convention << '\n';
  out << "* truncated " << (p.truncated ? 1 : 0) << '\n';
  out << "* constraints " << p.constraints.size() << '\n';
  for (const auto& c : p.constraints) {
    out << "* c " << c.id.i << ' ' << c.id.j << ' ' << c.id.g << ' ' << to_string(c.c0) << ' ' << to_string(c.c1)
        << ' ' << c.terms.size() << '\n';
    for (const auto& t : c.terms) out << "* t " << t.p << ' ' << t.q << ' ' << to_string(t.coeff) << '\n';
  }
  out << p.constraints.size() << '\n';
  out << "3\n";
  out << p.gram_size() << " 1 1\n";
  for (std::size_t k = 0; k < p.constraints.size(); ++k) out << (k ? " " : "") << fmt_double(to_double(p.constraints[k].c0));
  out << '\n';
  if (!p.constraints.empty()) {
    out << "0 2 1 1 1\n";
    out << "0 3 1 1 -1\n";
  }
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& c = p.constraints[k];
    for (const auto& t : c.terms) {
      Rational v = t.p == t.q ? t.coeff : Rational(t.coeff / 2);
      out << k + 1 << " 1 " << t.p + 1 << ' ' << t.q + 1 << ' ' << fmt_double(to_double(v)) << '\n';
    }
    if (c.c1 != 0) {
      out << k + 1 << " 2 1 1 " << fmt_double(to_double(-c.c1)) << '\n';
      out << k + 1 << " 3 1 1 " << fmt_double(to_double(c.c1)) << '\n';
    }
  }
  return out.str();
}

SOSProblem import_sdpa(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> meta, body;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '*' || line[0] == '"')
      meta.push_back(line.size() > 2 ? line.substr(2) : "");
    else
      body.push_back(line);
  }
  auto bad = [](const std::string& why) { return Error(ErrorCode::kParseError, "SDPA import: " + why); };
  std::size_t pos = 0;
  auto take = [&](const std::string& key) {
    if (pos >= meta.size()) throw bad("missing '" + key + "' metadata");
    std::istringstream ls(meta[pos++]);
    std::string k;
    ls >> k;
    if (k != key) throw bad("expected '" + key + "', got '" + k + "'");
    return ls.str().substr(std::min(ls.str().size(), key.size() + 1));
  };
  auto words = [](const std::string& s) {
    std::istringstream ls(s);
    std::vector<std::string> out;
    std::string w;
    while (ls >> w) out.push_back(w);
    return out;
  };
  auto num = [&](const std::string& s) -> long {
    try {
      std::size_t used = 0;
      long v = std::stol(s, &used);
      if (used != s.size()) throw bad("bad integer '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw bad("bad integer '" + s + "'");
    }
  };

  if (take("tncert-sdpa") != "1") throw bad("unsupported version");
  SOSProblem p;
  {
    auto w = words(take("mode"));
    if (w.size() != 2) throw bad("mode line");
    p.mode.kind = parse_mode_name(w[0]);
    p.mode.degree = static_cast<int>(num(w[1]));
  }
  p.module_rank = static_cast<std::size_t>(num(take("module-rank")));
  p.basis.half_radius = static_cast<int>(num(take("half-radius")));
  {
    auto w = words(take("basis"));
    if (w.size() != 2 || (w[0] != "ideal" && w[0] != "group")) throw bad("basis line");
    p.basis.ideal = w[0] == "ideal";
    long n = num(w[1]);
    for (long k = 0; k < n; ++k) {
      auto e = words(take("b"));
      if (e.size() != 2) throw bad("basis entry");
      p.basis.entries.push_back({static_cast<int>(num(e[0])), static_cast<int>(num(e[1]))});
    }
  }
  p.epsilon_cap = parse_rational(take("epsilon-cap"));
  p.fingerprint = take("fingerprint");
  p.convention = take("convention");
  p.truncated = num(take("truncated")) != 0;
  long m = num(take("constraints"));
  for (long k = 0; k < m; ++k) {
    auto w = words(take("c"));
    if (w.size() != 6) throw bad("constraint line");
    Constraint c;
    c.id = {static_cast<int>(num(w[0])), static_cast<int>(num(w[1])), static_cast<int>(num(w[2]))};
    c.c0 = parse_rational(w[3]);
    c.c1 = parse_rational(w[4]);
    long nt = num(w[5]);
    for (long t = 0; t < nt; ++t) {
      auto tw = words(take("t"));
      if (tw.size() != 3) throw bad("term line");
      c.terms.push_back({static_cast<int>(num(tw[0])), static_cast<int>(num(tw[1])), parse_rational(tw[2])});
    }
    p.constraints.push_back(std::move(c));
  }
  if (pos != meta.size()) throw bad("unexpected metadata '" + meta[pos] + "'");

  // The exact metadata is authoritative; the numeric body must be exactly
  // what it exports to.
  if (body.size() < 3) throw bad("truncated header");
  if (num(words(body[0]).at(0)) != m) throw bad("constraint count disagrees with the metadata");
  std::vector<std::string> expected;
  {
    std::istringstream regen(export_sdpa(p));
    std::string l;
    while (std::getline(regen, l))
      if (!l.empty() && l[0] != '*' && l[0] != '"') expected.push_back(l);
  }
  if (body.size() != expected.size()) throw bad("numeric body has the wrong number of lines");
  for (std::size_t k = 0; k < body.size(); ++k)
    if (words(body[k]) != words(expected[k])) throw bad("numeric body disagrees with the metadata at '" + body[k] + "'");
  return p;
}

}  // namespace tncert
