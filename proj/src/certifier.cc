#include "tncert/certifier.h"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "tncert/error.h"

namespace tncert {

namespace {

using Var = std::pair<int, int>;  // (p, q), p <= q

Rational gram_at(const RationalMatrix& Q, const Var& v) { return Q(v.first, v.second); }

void add_sym(RationalMatrix& Q, std::size_t p, std::size_t q, const Rational& x) {
  Q(p, q) += x;
  if (p != q) Q(q, p) += x;
}

}  // namespace

Rational repair_exactly(const SOSProblem& p, const Rational& epsilon, RationalMatrix& gram) {
  struct PivotRow {
    Var pivot;
    std::map<Var, Rational> row;  // pivot coefficient normalized to 1
    Rational rhs;
  };
  std::vector<PivotRow> pivots;
  std::map<Var, std::size_t> pivot_of;
  for (const auto& c : p.constraints) {
    std::map<Var, Rational> row;
    Rational rhs = c.c0 + epsilon * c.c1;
    for (const auto& t : c.terms) {
      row[{t.p, t.q}] += t.coeff;
      rhs -= t.coeff * gram_at(gram, {t.p, t.q});
    }
    // eliminate earlier pivots in creation order
    for (const auto& pr : pivots) {
      auto it = row.find(pr.pivot);
      if (it == row.end()) continue;
      Rational f = it->second;
      for (const auto& [v, a] : pr.row) {
        Rational& slot = row[v];
        slot -= f * a;
        if (slot == 0) row.erase(v);
      }
      rhs -= f * pr.rhs;
    }
    if (row.empty()) {
      if (rhs != 0)
        throw Error(ErrorCode::kRepairSingular,
                    "constraint (" + std::to_string(c.id.i) + "," + std::to_string(c.id.j) + ",g[" +
                        std::to_string(c.id.g) + "]) is dependent on earlier ones but inconsistent by " + to_string(rhs) +
                        "; constraint rank " + std::to_string(pivots.size()));
      continue;
    }
    // largest |coefficient|, lexicographically first among ties
    auto best = row.begin();
    for (auto it = row.begin(); it != row.end(); ++it)
      if (abs(it->second) > abs(best->second)) best = it;
    Var pv = best->first;
    Rational inv = 1 / best->second;
    for (auto& [v, a] : row) a *= inv;
    rhs *= inv;
    pivot_of[pv] = pivots.size();
    pivots.push_back({pv, std::move(row), rhs});
  }
  std::map<Var, Rational> delta;
  for (auto k = pivots.size(); k-- > 0;) {
    const auto& pr = pivots[k];
    Rational val = pr.rhs;
    for (const auto& [v, a] : pr.row) {
      if (v == pr.pivot) continue;
      if (auto it = delta.find(v); it != delta.end()) val -= a * it->second;
    }
    delta[pr.pivot] = val;
  }
  Rational largest = 0;
  for (const auto& [v, x] : delta) {
    add_sym(gram, v.first, v.second, x);
    if (abs(x) > largest) largest = abs(x);
  }
  return largest;
}

Certificate make_certificate(const SOSProblem& p, const Rational& epsilon, RationalMatrix gram) {
  Certificate c;
  c.mode = p.mode;
  c.epsilon = epsilon;
  c.module_rank = p.module_rank;
  c.basis = p.basis;
  c.gram = std::move(gram);
  c.fingerprint = p.fingerprint;
  c.convention = p.convention;
  c.truncated = p.truncated;
  return c;
}

RepairOutcome round_and_repair(const GramSolution& s, const SOSProblem& p, const CertifierConfig& cfg) {
  if (s.status != SolveStatus::kConverged)
    throw Error(ErrorCode::kInvalidArgument, "numeric solution is not converged (" +
                                                 std::string(status_name(s.status)) + ")");
  if (p.degenerate()) throw Error(ErrorCode::kInvalidArgument, "degenerate problem: every ε is feasible");
  const std::size_t n = p.gram_size();
  if (static_cast<std::size_t>(s.Q.rows()) != n) throw Error(ErrorCode::kDimensionMismatch, "Gram size mismatch");

  // Order unit: a PSD Gram U with A(U) = -c1, made definite when possible by
  // maximizing t in A(Q') + t·A(I) = -c1, U = Q' + t·I.
  std::vector<double> unit_target, unit_slope;
  for (const auto& c : p.constraints) {
    double diag = 0;
    for (const auto& t : c.terms)
      if (t.p == t.q) diag += to_double(t.coeff);
    unit_target.push_back(-to_double(c.c1));
    unit_slope.push_back(-diag);
  }
  GramSolution aux = solve_with_targets(p, unit_target, unit_slope, 1.0, cfg.solver);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
  bool definite = false;
  if (aux.status != SolveStatus::kDiverged && aux.Q.allFinite() && std::isfinite(aux.epsilon)) {
    U = aux.Q;
    if (aux.epsilon > 0) {
      U += aux.epsilon * Eigen::MatrixXd::Identity(n, n);
      definite = true;
    }
  }

  const double eps_num = s.epsilon;
  const double mu = cfg.margin_factor * std::max(s.residuals.constraint, s.residuals.psd_violation) + cfg.margin_floor;
  std::string last_failure = "numeric ε " + std::to_string(eps_num) + " leaves no positive certified value";
  Rational last_eps;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    // attempt 0 tries the numeric ε itself; then the margin grows tenfold
    double gap = attempt == 0 ? 0.0 : mu * std::pow(10.0, attempt - 1);
    bool clamped = false;
    if (gap >= eps_num / 2) {
      gap = eps_num / 2;
      clamped = true;
    }
    Rational eps_hat = floor_to_dyadic(eps_num - gap, cfg.epsilon_bits);
    if (eps_hat <= 0) break;
    last_eps = eps_hat;
    Eigen::MatrixXd Qd = s.Q + (eps_num - to_double(eps_hat)) * U;
    RationalMatrix Q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) Q(i, j) = Q(j, i) = round_to_dyadic(0.5 * (Qd(i, j) + Qd(j, i)), cfg.rounding_bits);
    Rational change = repair_exactly(p, eps_hat, Q);
    LdltResult f = ldlt(Q);
    if (f.psd) {
      RepairOutcome out{make_certificate(p, eps_hat, std::move(Q)), attempt, change, definite};
      return out;
    }
    last_failure = "exact LDLᵀ failed at pivot " + std::to_string(*f.failed_pivot) + " for ε̂ = " + to_string(eps_hat);
    if (clamped) break;
  }
  throw Error(ErrorCode::kPsdFailedAfterRetries,
              last_failure + " (numeric ε " + std::to_string(eps_num) + ", constraint residual " +
                  std::to_string(s.residuals.constraint) + ", PSD violation " +
                  std::to_string(s.residuals.psd_violation) + ")");
}

namespace {

std::vector<std::tuple<int, int, int, Rational>> expand_row(const SupportBasis& basis, const RationalMatrix& gram,
                                                            const Ball& ball, std::size_t p) {
  std::vector<std::tuple<int, int, int, Rational>> out;
  auto tp = basis.terms(p);
  for (std::size_t q = 0; q < basis.size(); ++q) {
    const Rational& w = gram(p, q);
    if (w == 0) continue;
    for (const auto& [x, a] : tp)
      for (const auto& [y, b] : basis.terms(q))
        out.emplace_back(basis.entries[p].row, basis.entries[q].row, product_index(ball, ball.inverse(x), y), w * a * b);
  }
  return out;
}

GroupRingMatrix assemble(std::vector<std::vector<std::tuple<int, int, int, Rational>>> rows, std::size_t m,
                         const BallPtr& ball) {
  std::vector<std::vector<GroupRingElement::Term>> blocks(m * m);
  for (auto& row : rows)
    for (auto& [i, j, g, q] : row) blocks[i * m + j].emplace_back(g, std::move(q));
  GroupRingMatrix out(m, m, ball);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out.set(i, j, GroupRingElement(ball, std::move(blocks[i * m + j])));
  return out;
}

void check_gram_shape(const SupportBasis& basis, std::size_t m, const RationalMatrix& gram) {
  if (gram.rows() != basis.size() || gram.cols() != basis.size())
    throw Error(ErrorCode::kDimensionMismatch, "Gram is " + std::to_string(gram.rows()) + "x" +
                                                   std::to_string(gram.cols()) + " but the basis has " +
                                                   std::to_string(basis.size()) + " entries");
  for (const auto& e : basis.entries)
    if (e.row < 0 || static_cast<std::size_t>(e.row) >= m)
      throw Error(ErrorCode::kDimensionMismatch, "basis row outside the module");
}

}  // namespace

GroupRingMatrix expand_gram(const SupportBasis& basis, std::size_t m, const RationalMatrix& gram, const BallPtr& out_ball) {
  check_gram_shape(basis, m, gram);
  std::vector<std::vector<std::tuple<int, int, int, Rational>>> rows(basis.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < basis.size(); ++p) {
    try {
      rows[p] = expand_row(basis, gram, *out_ball, p);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(std::move(rows), m, out_ball);
}

namespace serial {
GroupRingMatrix expand_gram(const SupportBasis& basis, std::size_t m, const RationalMatrix& gram, const BallPtr& out_ball) {
  check_gram_shape(basis, m, gram);
  std::vector<std::vector<std::tuple<int, int, int, Rational>>> rows(basis.size());
  for (std::size_t p = 0; p < basis.size(); ++p) rows[p] = expand_row(basis, gram, *out_ball, p);
  return assemble(std::move(rows), m, out_ball);
}
}  // namespace serial

VerificationReport verify_certificate(const Certificate& cert, const ChainComplexData& c) {
  auto start = std::chrono::steady_clock::now();
  if (cert.convention != kConvention)
    throw Error(ErrorCode::kConventionMismatch, "certificate uses convention '" + cert.convention + "'");
  if (cert.fingerprint != fingerprint(c))
    throw Error(ErrorCode::kFingerprintMismatch,
                "certificate was made for complex " + cert.fingerprint + ", got " + fingerprint(c));
  VerificationReport rep;
  rep.epsilon = cert.epsilon;
  auto fail = [&](const std::string& why) {
    if (!rep.first_failure) rep.first_failure = why;
  };

  // Identity: Σ Q_pq w_p* w_q == target(ε) entry for entry.
  try {
    const int d = cert.basis.half_radius;
    if (d < 0) throw Error(ErrorCode::kInvalidArgument, "negative half radius");
    validate_mode(c, cert.mode, {std::nullopt, true, true});
    Target target = build_target(c, cert.mode);
    if (target.truncated != cert.truncated) throw Error(ErrorCode::kInvalidArgument, "truncation flag does not match");
    if (target.c0.rows() != cert.module_rank) throw Error(ErrorCode::kInvalidArgument, "module rank does not match");
    BallPtr bd = enumerate_ball(c.presentation, d);
    if (bd->complete() && d > enumerate_ball(c.presentation, Ball::kFull)->radius())
      throw Error(ErrorCode::kInvalidArgument, "half radius exceeds the diameter of the group");
    SupportBasis canonical = build_support_basis(*bd, cert.mode, cert.module_rank);
    canonical.half_radius = d;
    if (!(canonical == cert.basis)) throw Error(ErrorCode::kInvalidArgument, "basis differs from the canonical basis");
    BallPtr b2d = enumerate_ball(c.presentation, 2 * d);
    GroupRingMatrix lhs = expand_gram(cert.basis, cert.module_rank, cert.gram, b2d);
    for (std::size_t i = 0; i < cert.module_rank && !rep.first_failure; ++i)
      for (std::size_t j = 0; j < cert.module_rank && !rep.first_failure; ++j) {
        std::map<int, Rational> diff;
        for (const auto& [g, q] : lhs(i, j).terms()) diff[g] += q;
        for (const auto& [g, q] : target.c0(i, j).terms()) diff[g] -= q;
        for (const auto& [g, q] : target.c1(i, j).terms()) diff[g] -= cert.epsilon * q;
        for (const auto& [g, q] : diff)
          if (q != 0) {
            std::string where = static_cast<std::size_t>(g) < b2d->size() ? element_name(*b2d, g) : "g[" + std::to_string(g) + "]";
            fail("identity violated at (" + std::to_string(i) + "," + std::to_string(j) + "," + where + "): Gram side minus target is " + to_string(q));
            break;
          }
      }
    rep.identity_ok = !rep.first_failure;
  } catch (const Error& e) {
    fail(std::string("identity cannot be established: ") + e.what());
    rep.identity_ok = false;
  }

  LdltResult f = ldlt(cert.gram);
  rep.psd_ok = f.psd;
  if (!f.psd) fail("Gram is not positive semidefinite: exact LDLᵀ fails at pivot " + std::to_string(*f.failed_pivot));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

int verify_exit_code(const VerificationReport& r) {
  if (!r.identity_ok) return 2;
  if (!r.psd_ok) return 3;
  return 0;
}

std::vector<Factor> extract_factors(const Certificate& cert, const BallPtr& ball) {
  LdltResult f = ldlt(cert.gram);
  if (!f.psd) throw Error(ErrorCode::kInvalidArgument, "Gram is not positive semidefinite");
  std::vector<Factor> out;
  const std::size_t n = cert.basis.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (f.pivots[i] == 0) continue;
    std::vector<std::vector<GroupRingElement::Term>> entries(cert.module_rank);
    for (std::size_t p = 0; p < n; ++p) {
      const Rational& l = f.lower(p, i);
      if (l == 0) continue;
      for (const auto& [g, a] : cert.basis.terms(p)) entries[cert.basis.entries[p].row].emplace_back(g, l * a);
    }
    GroupRingMatrix y(1, cert.module_rank, ball);
    for (std::size_t j = 0; j < cert.module_rank; ++j) y.set(0, j, GroupRingElement(ball, std::move(entries[j])));
    out.push_back({f.pivots[i], std::move(y)});
  }
  return out;
}

RationalMatrix order_unit_gram(const SOSProblem& p, const ChainComplexData& c) {
  const std::size_t n = p.gram_size();
  RationalMatrix U(n, n);
  const auto& entries = p.basis.entries;
  switch (p.mode.kind) {
    case SOSKind::kBracket:
      for (std::size_t k = 0; k < n; ++k)
        if (entries[k].element == 0) U(k, k) = 1;
      break;
    case SOSKind::kOzawa: {
      // Δ₀ = Σ_s (s - e)*(s - e)
      for (std::size_t s = 0; s < c.presentation->rank(); ++s) {
        int g = c.ball->edge(0, static_cast<int>(2 * s));
        if (g == 0) continue;
        bool found = false;
        for (std::size_t k = 0; k < n && !found; ++k)
          if (entries[k].element == g) {
            U(k, k) += 1;
            found = true;
          }
        if (!found) throw Error(ErrorCode::kRadiusTooSmall, "generator outside the support basis");
      }
      break;
    }
    case SOSKind::kParen: {
      // Δ₀ = Σ_g v_g (g - e); Δ₀² = Δ₀*Δ₀ = Σ v_p v_q (g_p - e)*(g_q - e) per row
      GroupRingElement d0 = laplacian(c, 0).matrix(0, 0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (entries[a].row == entries[b].row) U(a, b) = d0.coeff(entries[a].element) * d0.coeff(entries[b].element);
      for (const auto& [g, q] : d0.terms()) {
        if (g == 0) continue;
        bool found = false;
        for (const auto& e : entries) found = found || e.element == g;
        if (!found) throw Error(ErrorCode::kRadiusTooSmall, "Δ₀ support outside the basis");
      }
      break;
    }
  }
  return U;
}

Certificate retreat_certificate(const Certificate& cert, const Rational& new_epsilon, const RationalMatrix& order_unit) {
  Certificate out = cert;
  Rational shift = cert.epsilon - new_epsilon;
  for (std::size_t i = 0; i < out.gram.rows(); ++i)
    for (std::size_t j = 0; j < out.gram.cols(); ++j) out.gram(i, j) += shift * order_unit(i, j);
  out.epsilon = new_epsilon;
  return out;
}

std::string serialize(const Certificate& cert) {
  std::ostringstream out;
  out << "tncert-certificate 1\n";
  out << "mode " << mode_name(cert.mode.kind) << '\n';
  out << "degree " << cert.mode.degree << '\n';
  out << "epsilon " << to_string(cert.epsilon) << '\n';
  out << "convention " << cert.convention << '\n';
  out << "fingerprint " << cert.fingerprint << '\n';
  out << "truncated " << (cert.truncated ? 1 : 0) << '\n';
  out << "module-rank " << cert.module_rank << '\n';
  for (const auto& [k, v] : cert.params) out << "param " << k << ' ' << v << '\n';
  out << "basis " << (cert.basis.ideal ? "ideal" : "group") << ' ' << cert.basis.half_radius << ' '
      << cert.basis.size() << '\n';
  for (const auto& e : cert.basis.entries) out << "b " << e.element << ' ' << e.row << '\n';
  out << "gram " << cert.gram.rows() << '\n';
  for (std::size_t i = 0; i < cert.gram.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) out << (j ? " " : "") << to_string(cert.gram(i, j));
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

Certificate parse_certificate(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto bad = [](const std::string& why) { return Error(ErrorCode::kParseError, "certificate: " + why); };
  auto next = [&]() {
    if (!std::getline(in, line)) throw bad("unexpected end of file");
    return line;
  };
  auto field = [&](const std::string& key) {
    next();
    if (line.rfind(key + " ", 0) != 0) throw bad("expected '" + key + "'");
    return line.substr(key.size() + 1);
  };
  auto integer = [&](const std::string& s) -> long {
    try {
      std::size_t used = 0;
      long v = std::stol(s, &used);
      if (used != s.size()) throw bad("bad integer '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw bad("bad integer '" + s + "'");
    }
  };
  auto split = [](const std::string& s) {
    std::istringstream ls(s);
    std::vector<std::string> w;
    std::string t;
    while (ls >> t) w.push_back(t);
    return w;
  };

  if (next() != "tncert-certificate 1") throw bad("bad header");
  Certificate c;
  c.mode.kind = parse_mode_name(field("mode"));
  c.mode.degree = static_cast<int>(integer(field("degree")));
  c.epsilon = parse_rational(field("epsilon"));
  c.convention = field("convention");
  c.fingerprint = field("fingerprint");
  std::string trunc = field("truncated");
  if (trunc != "0" && trunc != "1") throw bad("truncated must be 0 or 1");
  c.truncated = trunc == "1";
  long m = integer(field("module-rank"));
  if (m < 0) throw bad("negative module rank");
  c.module_rank = static_cast<std::size_t>(m);
  next();
  while (line.rfind("param ", 0) == 0) {
    auto w = split(line.substr(6));
    if (w.size() != 2) throw bad("bad param line");
    c.params.emplace_back(w[0], w[1]);
    next();
  }
  {
    if (line.rfind("basis ", 0) != 0) throw bad("expected 'basis'");
    auto w = split(line.substr(6));
    if (w.size() != 3 || (w[0] != "ideal" && w[0] != "group")) throw bad("bad basis line");
    c.basis.ideal = w[0] == "ideal";
    c.basis.half_radius = static_cast<int>(integer(w[1]));
    long n = integer(w[2]);
    if (n < 0 || n > 1000000) throw bad("bad basis size");
    for (long k = 0; k < n; ++k) {
      auto e = split(field("b"));
      if (e.size() != 2) throw bad("bad basis entry");
      c.basis.entries.push_back({static_cast<int>(integer(e[0])), static_cast<int>(integer(e[1]))});
    }
  }
  long n = integer(field("gram"));
  if (n != static_cast<long>(c.basis.size())) throw bad("Gram size differs from the basis size");
  c.gram = RationalMatrix(n, n);
  for (long i = 0; i < n; ++i) {
    auto w = split(next());
    if (static_cast<long>(w.size()) != i + 1) throw bad("Gram row " + std::to_string(i) + " has the wrong length");
    for (long j = 0; j <= i; ++j) c.gram(i, j) = c.gram(j, i) = parse_rational(w[j]);
  }
  if (next() != "end") throw bad("expected 'end'");
  if (std::getline(in, line)) throw bad("trailing content");
  if (serialize(c) != text) throw bad("not in canonical form");
  return c;
}

}  // namespace tncert
