#include "tncert/sdp.h"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "tncert/error.h"

namespace tncert {

void SolverConfig::validate() const {
  if (max_iterations <= 0) throw Error(ErrorCode::kInvalidArgument, "max iterations must be positive");
  if (!(tolerance > 0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  if (!(rho > 0)) throw Error(ErrorCode::kInvalidArgument, "rho must be positive");
  if (!(alpha >= 1 && alpha < 2)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [1, 2)");
}

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIter: return "max-iter";
    case SolveStatus::kDiverged: return "diverged";
    case SolveStatus::kDegenerate: return "degenerate";
  }
  return "?";
}

namespace {

const double kSqrt2 = std::sqrt(2.0);

// svec index of (p, q), p <= q, for an n x n matrix; ε sits last.
struct Layout {
  std::size_t n;
  std::size_t index(std::size_t p, std::size_t q) const { return q * (q + 1) / 2 + p; }
  std::size_t eps() const { return n * (n + 1) / 2; }
  std::size_t size() const { return eps() + 1; }
};

Eigen::MatrixXd unpack(const Layout& L, const Eigen::VectorXd& x) {
  Eigen::MatrixXd Q(L.n, L.n);
  for (std::size_t q = 0; q < L.n; ++q)
    for (std::size_t p = 0; p <= q; ++p) {
      double v = x[L.index(p, q)];
      if (p != q) v /= kSqrt2;
      Q(p, q) = Q(q, p) = v;
    }
  return Q;
}

void pack(const Layout& L, const Eigen::MatrixXd& Q, Eigen::VectorXd& x) {
  for (std::size_t q = 0; q < L.n; ++q)
    for (std::size_t p = 0; p <= q; ++p) x[L.index(p, q)] = p == q ? Q(p, q) : Q(p, q) * kSqrt2;
}

// Affine projection v ↦ v - Aᵀ(AAᵀ)⁺(Av - b) with rows normalized to unit length.
class AffineProjector {
 public:
  AffineProjector(const SOSProblem& p, const Layout& L, const std::vector<double>& c0, const std::vector<double>& c1)
      : b_(p.constraints.size()) {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < p.constraints.size(); ++k) {
      const auto& c = p.constraints[k];
      double norm2 = c1[k] * c1[k];
      std::vector<std::pair<std::size_t, double>> row;
      for (const auto& t : c.terms) {
        double a = to_double(t.coeff);
        if (t.p != t.q) a /= kSqrt2;
        row.emplace_back(L.index(t.p, t.q), a);
        norm2 += a * a;
      }
      row.emplace_back(L.eps(), -c1[k]);
      double scale = norm2 > 0 ? 1.0 / std::sqrt(norm2) : 1.0;
      for (auto& [col, a] : row)
        if (a != 0) trip.emplace_back(static_cast<int>(k), static_cast<int>(col), a * scale);
      b_[k] = c0[k] * scale;
    }
    A_.resize(static_cast<Eigen::Index>(p.constraints.size()), static_cast<Eigen::Index>(L.size()));
    A_.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd AAt = Eigen::MatrixXd(A_ * A_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(AAt);
    const Eigen::VectorXd& w = es.eigenvalues();
    double cutoff = (w.size() ? w.cwiseAbs().maxCoeff() : 0.0) * 1e-12 * std::max<double>(1.0, static_cast<double>(w.size()));
    Eigen::VectorXd inv = w.unaryExpr([cutoff](double v) { return v > cutoff ? 1.0 / v : 0.0; });
    pinv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }

  // Distance of the closest point from the affine set (0 unless the system
  // is inconsistent).
  double inconsistency() const {
    if (A_.rows() == 0) return 0.0;
    Eigen::VectorXd x = project(Eigen::VectorXd::Zero(A_.cols()));
    return (A_ * x - b_).lpNorm<Eigen::Infinity>();
  }

  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    if (A_.rows() == 0) return v;
    Eigen::VectorXd r = A_ * v - b_;
    return v - A_.transpose() * (pinv_ * r);
  }

 private:
  Eigen::SparseMatrix<double> A_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd pinv_;
};

void project_psd(const Layout& L, Eigen::VectorXd& z, double cap) {
  if (L.n > 0) {
    Eigen::MatrixXd Q = unpack(L, z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    Q = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    pack(L, Q, z);
  }
  z[L.eps()] = std::clamp(z[L.eps()], -cap, cap);
}

double residual_inf(const SOSProblem& p, const Eigen::MatrixXd& Q, double eps, const std::vector<double>& c0,
                    const std::vector<double>& c1) {
  double worst = 0;
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& c = p.constraints[k];
    double lhs = 0;
    for (const auto& t : c.terms) lhs += to_double(t.coeff) * Q(t.p, t.q);
    worst = std::max(worst, std::abs(lhs - c0[k] - eps * c1[k]));
  }
  return worst;
}

std::vector<double> column(const SOSProblem& p, bool first) {
  std::vector<double> out;
  for (const auto& c : p.constraints) out.push_back(to_double(first ? c.c0 : c.c1));
  return out;
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& Q) {
  if (Q.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double constraint_residual(const SOSProblem& p, const Eigen::MatrixXd& Q, double epsilon) {
  return residual_inf(p, Q, epsilon, column(p, true), column(p, false));
}

GramSolution solve_with_targets(const SOSProblem& p, const std::vector<double>& c0, const std::vector<double>& c1,
                                double cap, const SolverConfig& cfg) {
  cfg.validate();
  const Layout L{p.gram_size()};
  if (L.n > cfg.max_gram_size)
    throw Error(ErrorCode::kCapExceeded, "Gram size " + std::to_string(L.n) + " exceeds the configured limit " +
                                             std::to_string(cfg.max_gram_size));
  GramSolution sol;
  sol.Q = Eigen::MatrixXd::Zero(L.n, L.n);
  if (std::all_of(c1.begin(), c1.end(), [](double v) { return v == 0; })) {
    sol.status = SolveStatus::kDegenerate;
    sol.residuals.constraint = residual_inf(p, sol.Q, 0.0, c0, c1);
    return sol;
  }

  AffineProjector affine(p, L, c0, c1);
  if (affine.inconsistency() > 1e-8) {
    // No (Q, ε) satisfies the linear constraints at all.
    sol.status = SolveStatus::kDiverged;
    sol.residuals.constraint = affine.inconsistency();
    return sol;
  }
  const std::size_t dim = L.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim), z = Eigen::VectorXd::Zero(dim), u = Eigen::VectorXd::Zero(dim);
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-1e-12, 1e-12);
    for (std::size_t i = 0; i < dim; ++i) z[i] = jitter(rng);
  }
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(dim);
  objective[L.eps()] = 1.0;
  double rho = cfg.rho;
  double primal = 0, dual = 0;
  int it = 0;
  bool diverged = false;
  for (it = 1; it <= cfg.max_iterations; ++it) {
    x = affine.project(z - u + objective / rho);
    Eigen::VectorXd xr = cfg.alpha * x + (1 - cfg.alpha) * z;
    Eigen::VectorXd z_prev = z;
    z = xr + u;
    project_psd(L, z, cap);
    u += xr - z;
    primal = (x - z).lpNorm<Eigen::Infinity>();
    dual = rho * (z - z_prev).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(primal) || !std::isfinite(dual)) {
      diverged = true;
      break;
    }
    if (primal <= cfg.tolerance && dual <= cfg.tolerance) {
      Eigen::VectorXd candidate = affine.project(z);
      if (-min_eigenvalue(unpack(L, candidate)) <= cfg.tolerance) break;
    }
    if (it % 20 == 0) {
      if (primal > 10 * dual) {
        rho *= 2;
        u /= 2;
      } else if (dual > 10 * primal) {
        rho /= 2;
        u *= 2;
      }
    }
  }
  sol.iterations = std::min(it, cfg.max_iterations);
  sol.loop_residual = primal;
  // Emit the affine projection of the PSD iterate, so the constraints hold to
  // rounding and the remaining error is a (small) PSD violation.
  Eigen::VectorXd emit = affine.project(z);
  sol.Q = unpack(L, emit);
  sol.epsilon = emit[L.eps()];
  sol.residuals.constraint = residual_inf(p, sol.Q, sol.epsilon, c0, c1);
  sol.residuals.dual = dual;
  sol.residuals.psd_violation = std::max(0.0, -min_eigenvalue(sol.Q));
  if (diverged || !std::isfinite(sol.epsilon))
    sol.status = SolveStatus::kDiverged;
  else if (it <= cfg.max_iterations && sol.residuals.constraint <= cfg.tolerance &&
           sol.residuals.psd_violation <= cfg.tolerance)
    sol.status = SolveStatus::kConverged;
  else
    sol.status = SolveStatus::kMaxIter;
  return sol;
}

GramSolution solve(const SOSProblem& p, const SolverConfig& cfg) {
  return solve_with_targets(p, column(p, true), column(p, false), to_double(p.epsilon_cap), cfg);
}

std::string write_solution(const GramSolution& s) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "epsilon %.17g\n", s.epsilon);
  out += buf;
  for (Eigen::Index i = 0; i < s.Q.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g\n", s.Q(i, j));
      out += buf;
    }
  return out;
}

GramSolution import_solution(const SOSProblem& p, std::string_view text, const SolverConfig& cfg) {
  std::istringstream in{std::string(text)};
  std::string key;
  GramSolution s;
  std::string eps_text;
  if (!(in >> key >> eps_text) || key != "epsilon") throw Error(ErrorCode::kParseError, "solution must start with 'epsilon'");
  auto parse = [](const std::string& t) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(t, &used);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError, "bad number '" + t + "'");
    }
    if (used != t.size()) throw Error(ErrorCode::kParseError, "bad number '" + t + "'");
    return v;
  };
  s.epsilon = parse(eps_text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(parse(tok));
  std::size_t n = 0;
  while (n * (n + 1) / 2 < values.size()) ++n;
  if (n * (n + 1) / 2 != values.size())
    throw Error(ErrorCode::kParseError, "entry count " + std::to_string(values.size()) + " is not a lower triangle");
  if (n < p.gram_size())
    throw Error(ErrorCode::kParseError, "solution is truncated: " + std::to_string(values.size()) + " entries");
  if (n != p.gram_size())
    throw Error(ErrorCode::kDimensionMismatch,
                "solution has Gram size " + std::to_string(n) + ", problem has " + std::to_string(p.gram_size()));
  s.Q.resize(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) s.Q(i, j) = s.Q(j, i) = values[k++];
  s.residuals.constraint = constraint_residual(p, s.Q, s.epsilon);
  s.residuals.psd_violation = std::max(0.0, -min_eigenvalue(s.Q));
  s.loop_residual = s.residuals.constraint;
  s.status = p.degenerate() ? SolveStatus::kDegenerate
             : s.residuals.constraint <= cfg.tolerance && s.residuals.psd_violation <= cfg.tolerance
                 ? SolveStatus::kConverged
                 : SolveStatus::kDiverged;
  return s;
}

}  // namespace tncert
