#include "tncert/oracle.h"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tncert/error.h"

namespace tncert {

namespace {

constexpr double kKernelThreshold = 1e-10;

RationalMatrix word_action(const FiniteModule& V, const std::vector<RationalMatrix>& inverses, const FreeWord& w) {
  RationalMatrix out = RationalMatrix::identity(V.dimension);
  for (const auto& l : w.letters) out = out * (l.exponent > 0 ? V.generators[l.generator] : inverses[l.generator]);
  return out;
}

std::vector<RationalMatrix> inverses_of(const FiniteModule& V) {
  std::vector<RationalMatrix> inv;
  for (const auto& g : V.generators) inv.push_back(inverse(g));
  return inv;
}

void finish_module(FiniteModule& V, const Presentation& p) {
  if (V.generators.size() != p.rank())
    throw Error(ErrorCode::kInvalidArgument, "module needs one matrix per generator");
  for (const auto& g : V.generators)
    if (g.rows() != V.dimension || g.cols() != V.dimension)
      throw Error(ErrorCode::kShapeMismatch, "module matrices must be " + std::to_string(V.dimension) + "x" +
                                                 std::to_string(V.dimension));
  auto inv = inverses_of(V);
  const RationalMatrix id = RationalMatrix::identity(V.dimension);
  for (const auto& r : p.relators)
    if (!(word_action(V, inv, r) == id))
      throw Error(ErrorCode::kInvalidArgument, "relator " + to_text(p, r) + " acts nontrivially on " + V.name);
  V.is_unitary = true;
  for (const auto& g : V.generators)
    if (!(transpose(g) * V.form * g == V.form)) V.is_unitary = false;
}

void require_complete(const Ball& ball) {
  if (!ball.complete()) throw Error(ErrorCode::kInvalidArgument, "the oracle needs a finite group and its full ball");
}

}  // namespace

FiniteModule builtin_module(std::string_view kind, const BallPtr& full_ball) {
  require_complete(*full_ball);
  const Presentation& p = *full_ball->presentation();
  const std::size_t n = full_ball->size();
  FiniteModule V;
  V.name = std::string(kind);
  if (kind == "trivial" || kind == "sign") {
    V.dimension = 1;
    for (std::size_t s = 0; s < p.rank(); ++s) {
      RationalMatrix m(1, 1);
      m(0, 0) = kind == "trivial" ? 1 : -1;
      V.generators.push_back(m);
    }
  } else if (kind == "reg") {
    V.dimension = n;
    for (std::size_t s = 0; s < p.rank(); ++s) {
      int gen = full_ball->edge(0, static_cast<int>(2 * s));
      RationalMatrix m(n, n);
      for (std::size_t g = 0; g < n; ++g) m(product_index(*full_ball, gen, static_cast<int>(g)), g) = 1;
      V.generators.push_back(m);
    }
  } else if (kind == "reg0") {
    // basis g - e for g != e, coordinate g - 1
    V.dimension = n - 1;
    for (std::size_t s = 0; s < p.rank(); ++s) {
      int gen = full_ball->edge(0, static_cast<int>(2 * s));
      RationalMatrix m(n - 1, n - 1);
      for (std::size_t g = 1; g < n; ++g) {
        int sg = product_index(*full_ball, gen, static_cast<int>(g));
        if (sg != 0) m(sg - 1, g - 1) += 1;
        if (gen != 0) m(gen - 1, g - 1) -= 1;
      }
      V.generators.push_back(m);
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown module '" + std::string(kind) + "' (trivial, reg, reg0, sign)");
  }
  V.form = RationalMatrix::identity(V.dimension);
  if (kind == "reg0")
    for (std::size_t i = 0; i < V.dimension; ++i)
      for (std::size_t j = 0; j < V.dimension; ++j) V.form(i, j) += 1;
  finish_module(V, p);
  return V;
}

FiniteModule user_module(const PresentationPtr& p, std::vector<RationalMatrix> generators, std::string name) {
  FiniteModule V;
  V.name = std::move(name);
  V.dimension = generators.empty() ? 0 : generators[0].rows();
  V.generators = std::move(generators);
  V.form = RationalMatrix::identity(V.dimension);
  finish_module(V, *p);
  return V;
}

std::vector<RationalMatrix> element_actions(const FiniteModule& V, const Ball& ball) {
  auto inv = inverses_of(V);
  std::vector<RationalMatrix> out;
  out.reserve(ball.size());
  for (std::size_t g = 0; g < ball.size(); ++g) out.push_back(word_action(V, inv, ball.word(static_cast<int>(g))));
  return out;
}

RationalMatrix specialize(const GroupRingMatrix& M, const std::vector<RationalMatrix>& rho, std::size_t dim) {
  RationalMatrix out(M.rows() * dim, M.cols() * dim);
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j)
      for (const auto& [g, q] : M(i, j).terms()) {
        const RationalMatrix& r = rho.at(g);
        for (std::size_t a = 0; a < dim; ++a)
          for (std::size_t b = 0; b < dim; ++b)
            if (r(a, b) != 0) out(i * dim + a, j * dim + b) += q * r(a, b);
      }
  return out;
}

namespace {

void check_cap(std::size_t n, std::size_t dim, int k, std::size_t cap) {
  double size = std::pow(static_cast<double>(n), k + 1) * static_cast<double>(dim);
  if (size > static_cast<double>(cap))
    throw Error(ErrorCode::kCapExceeded, "bar complex in degree " + std::to_string(k) + " needs " +
                                             std::to_string(static_cast<long long>(size)) + " coordinates (cap " +
                                             std::to_string(cap) + ")");
}

struct BarContext {
  const Ball& ball;
  std::size_t n;
  std::size_t dim;
  std::vector<RationalMatrix> rho;
  std::vector<RationalMatrix> rho_inv;  // ρ(g^-1)

  int mul(int x, int y) const { return product_index(ball, x, y); }
  int inv(int x) const { return ball.inverse(x); }
  // coordinate of (tuple, component)
  int at(std::initializer_list<int> tuple, std::size_t comp) const {
    std::size_t idx = 0;
    for (int t : tuple) idx = idx * n + static_cast<std::size_t>(t);
    return static_cast<int>(idx * dim + comp);
  }
};

class Accumulator {
 public:
  void add(int idx, const Rational& q) {
    if (q != 0) terms_.emplace_back(idx, q);
  }
  // column a of m, placed at coordinates base + component
  void add_column(const RationalMatrix& m, std::size_t a, int base, const Rational& sign) {
    for (std::size_t b = 0; b < m.rows(); ++b)
      if (m(b, a) != 0) add(base + static_cast<int>(b), sign * m(b, a));
  }
  SparseVector take() {
    std::sort(terms_.begin(), terms_.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    SparseVector out;
    for (auto& [i, q] : terms_) {
      if (!out.empty() && out.back().first == i)
        out.back().second += q;
      else
        out.emplace_back(i, q);
      if (out.back().second == 0) out.pop_back();
    }
    terms_.clear();
    return out;
  }

 private:
  std::vector<std::pair<int, Rational>> terms_;
};

BarContext make_context(const Ball& ball, const FiniteModule& V) {
  require_complete(ball);
  BarContext ctx{ball, ball.size(), V.dimension, element_actions(V, ball), {}};
  for (std::size_t g = 0; g < ctx.n; ++g) ctx.rho_inv.push_back(ctx.rho[ball.inverse(static_cast<int>(g))]);
  return ctx;
}

// rank of δ^k : C^k -> C^{k+1}, from the images of the basis cochains.
std::size_t coboundary_rank(const BarContext& c, int k) {
  SparseEchelon ech;
  Accumulator acc;
  const int n = static_cast<int>(c.n);
  const Rational one(1), minus(-1);
  for (std::size_t a = 0; a < c.dim; ++a) {
    if (k == 0) {
      // (δv)(g) = g·v - v
      for (int g = 0; g < n; ++g) {
        acc.add_column(c.rho[g], a, c.at({g}, 0), one);
        acc.add(c.at({g}, a), minus);
      }
      ech.insert(acc.take());
    } else if (k == 1) {
      // (δf)(g,h) = g·f(h) - f(gh) + f(g), f = e_a at h0
      for (int h0 = 0; h0 < n; ++h0) {
        for (int g = 0; g < n; ++g) {
          acc.add_column(c.rho[g], a, c.at({g, h0}, 0), one);
          acc.add(c.at({g, c.mul(c.inv(g), h0)}, a), minus);
          acc.add(c.at({h0, g}, a), one);
        }
        ech.insert(acc.take());
      }
    } else {
      // (δf)(g,h,k) = g·f(h,k) - f(gh,k) + f(g,hk) - f(g,h), f = e_a at (h0,k0)
      for (int h0 = 0; h0 < n; ++h0)
        for (int k0 = 0; k0 < n; ++k0) {
          for (int g = 0; g < n; ++g) {
            acc.add_column(c.rho[g], a, c.at({g, h0, k0}, 0), one);
            acc.add(c.at({g, c.mul(c.inv(g), h0), k0}, a), minus);
            acc.add(c.at({h0, g, c.mul(c.inv(g), k0)}, a), one);
            acc.add(c.at({h0, k0, g}, a), minus);
          }
          ech.insert(acc.take());
        }
    }
  }
  return ech.rank();
}

// rank of ∂_k : C_k -> C_{k-1} (k >= 1), right action v·g = ρ(g^-1)v.
std::size_t boundary_rank(const BarContext& c, int k) {
  SparseEchelon ech;
  Accumulator acc;
  const int n = static_cast<int>(c.n);
  const Rational one(1), minus(-1);
  for (std::size_t a = 0; a < c.dim; ++a) {
    if (k == 1) {
      for (int g = 0; g < n; ++g) {
        acc.add_column(c.rho_inv[g], a, 0, one);
        acc.add(static_cast<int>(a), minus);
        ech.insert(acc.take());
      }
    } else if (k == 2) {
      for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h) {
          acc.add_column(c.rho_inv[g], a, c.at({h}, 0), one);
          acc.add(c.at({c.mul(g, h)}, a), minus);
          acc.add(c.at({g}, a), one);
          ech.insert(acc.take());
        }
    } else {
      for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
          for (int l = 0; l < n; ++l) {
            acc.add_column(c.rho_inv[g], a, c.at({h, l}, 0), one);
            acc.add(c.at({c.mul(g, h), l}, a), minus);
            acc.add(c.at({g, c.mul(h, l)}, a), one);
            acc.add(c.at({g, h}, a), minus);
            ech.insert(acc.take());
          }
    }
  }
  return ech.rank();
}

std::size_t power(std::size_t n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= n;
  return r;
}

}  // namespace

std::size_t bar_cohomology(const Ball& full_ball, const FiniteModule& V, int k, std::size_t cap) {
  if (k < 0 || k > 2) throw Error(ErrorCode::kInvalidArgument, "bar cohomology is limited to degrees 0..2");
  check_cap(full_ball.size(), V.dimension, k, cap);
  BarContext c = make_context(full_ball, V);
  std::size_t cochains = power(c.n, k) * c.dim;
  std::size_t below = k == 0 ? 0 : coboundary_rank(c, k - 1);
  return cochains - coboundary_rank(c, k) - below;
}

std::size_t bar_homology(const Ball& full_ball, const FiniteModule& V, int k, std::size_t cap) {
  if (k < 0 || k > 2) throw Error(ErrorCode::kInvalidArgument, "bar homology is limited to degrees 0..2");
  check_cap(full_ball.size(), V.dimension, k, cap);
  BarContext c = make_context(full_ball, V);
  std::size_t chains = power(c.n, k) * c.dim;
  std::size_t out = k == 0 ? 0 : boundary_rank(c, k);
  return chains - out - boundary_rank(c, k + 1);
}

std::vector<double> laplacian_spectrum(const ChainComplexData& c, const FiniteModule& V, int k) {
  if (!V.is_unitary) throw Error(ErrorCode::kNotUnitary, "module " + V.name + " is not unitary");
  require_complete(*c.ball);
  RationalMatrix X = specialize(laplacian(c, k).matrix, element_actions(V, *c.ball), V.dimension);
  const Eigen::Index n = static_cast<Eigen::Index>(X.rows());
  Eigen::MatrixXd Xd(n, n), H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) Xd(i, j) = to_double(X(i, j));
  const Eigen::Index dim = static_cast<Eigen::Index>(V.dimension);
  for (Eigen::Index b = 0; b * dim < n; ++b)
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) H(b * dim + i, b * dim + j) = to_double(V.form(i, j));
  // Lᵀ X L⁻ᵀ is symmetric when X is self-adjoint for H = L Lᵀ.
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd S = L.transpose() * Xd * L.transpose().inverse();
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::kNotUnitary, "specialized Laplacian is not self-adjoint");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (double& v : out)
    if (std::abs(v) < 1e-13 * scale) v = 0.0;
  std::sort(out.begin(), out.end());
  return out;
}

bool OracleReport::all_pass() const {
  return !degrees.empty() && std::all_of(degrees.begin(), degrees.end(), [](const auto& d) { return d.pass; });
}

OracleReport cross_check(const ChainComplexData& c, const FiniteModule& V, int from, int to, std::size_t cap) {
  require_complete(*c.ball);
  if (from < 0 || to < from) throw Error(ErrorCode::kInvalidArgument, "bad degree range");
  OracleReport rep;
  rep.group = to_text(*c.presentation);
  rep.module = V.name + " (dim " + std::to_string(V.dimension) + ")";
  auto rho = element_actions(V, *c.ball);
  for (int k = from; k <= to; ++k) {
    OracleDegree d;
    d.degree = k;
    if (k <= 2) {
      d.cohomology = bar_cohomology(*c.ball, V, k, cap);
      d.homology = bar_homology(*c.ball, V, k, cap);
      d.source = "bar complex";
    } else {
      // finite group, characteristic 0: H^k = H_k = 0 for k >= 1
      d.cohomology = d.homology = 0;
      d.source = "vanishing over Q for finite groups";
    }
    RationalMatrix X = specialize(laplacian(c, k).matrix, rho, V.dimension);
    d.kernel_dimension = X.rows() - rank(X);
    d.spectrum = laplacian_spectrum(c, V, k);
    double min_abs = INFINITY;
    for (double v : d.spectrum) min_abs = std::min(min_abs, std::abs(v));
    bool invertible = min_abs > kKernelThreshold;
    std::ostringstream why;
    if (d.kernel_dimension != d.cohomology)
      why << "dim ker Δ_" << k << " = " << d.kernel_dimension << " but dim H^" << k << " = " << d.cohomology << "; ";
    if (d.kernel_dimension != d.homology)
      why << "dim ker Δ_" << k << " = " << d.kernel_dimension << " but dim H_" << k << " = " << d.homology << "; ";
    if (invertible != (d.cohomology == 0))
      why << "min |spectrum| = " << min_abs << " disagrees with dim H^" << k << " = " << d.cohomology << "; ";
    d.witness = why.str();
    if (!d.witness.empty()) d.witness.resize(d.witness.size() - 2);
    d.pass = d.witness.empty();
    rep.degrees.push_back(std::move(d));
  }
  return rep;
}

std::string OracleReport::to_text() const {
  std::ostringstream out;
  out << "group:\n";
  std::istringstream g(group);
  std::string line;
  while (std::getline(g, line)) out << "  " << line << '\n';
  out << "module: " << module << '\n';
  out << "(finite-dimensional modules: reduced and ordinary (co)homology agree)\n";
  for (const auto& d : degrees) {
    out << "degree " << d.degree << ": H^" << d.degree << " = " << d.cohomology << ", H_" << d.degree << " = "
        << d.homology << " [" << d.source << "], dim ker Δ = " << d.kernel_dimension << ", spectrum {";
    for (std::size_t i = 0; i < d.spectrum.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", d.spectrum[i]);
      out << (i ? ", " : "") << buf;
    }
    out << "} " << (d.pass ? "PASS" : "FAIL");
    if (!d.pass) out << " (" << d.witness << ")";
    out << '\n';
  }
  out << (all_pass() ? "all PASS" : "FAIL") << '\n';
  return out.str();
}

std::string OracleReport::to_json() const {
  nlohmann::json j;
  j["group"] = group;
  j["module"] = module;
  j["all_pass"] = all_pass();
  for (const auto& d : degrees) {
    j["degrees"].push_back({{"degree", d.degree},
                            {"cohomology", d.cohomology},
                            {"homology", d.homology},
                            {"source", d.source},
                            {"kernel_dimension", d.kernel_dimension},
                            {"spectrum", d.spectrum},
                            {"pass", d.pass},
                            {"witness", d.witness}});
  }
  return j.dump(2) + "\n";
}

}  // namespace tncert
