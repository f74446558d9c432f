#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>

#include "tncert/sos.h"

namespace tncert {

struct SolverConfig {
  int max_iterations = 50000;
  double tolerance = 1e-9;  // primal and dual residual, PSD violation
  double rho = 1.0;         // initial penalty, adapted by residual balancing
  double alpha = 1.6;       // over-relaxation, in [1, 2)
  std::uint64_t seed = 0;
  std::size_t max_gram_size = 4000;

  void validate() const;
};

enum class SolveStatus { kConverged, kMaxIter, kDiverged, kDegenerate };

std::string_view status_name(SolveStatus s);

struct ResidualReport {
  double constraint = 0;     // ∞-norm of A(Q, ε) - c0
  double dual = 0;           // last ρ‖z - z_prev‖∞ of the loop
  double psd_violation = 0;  // max(0, -λ_min(Q))
};

struct GramSolution {
  Eigen::MatrixXd Q;
  double epsilon = 0;
  ResidualReport residuals;
  double loop_residual = 0;  // ‖x - z‖∞ claimed by the loop at exit
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIter;
};

// Maximizes ε subject to the constraints of p, Q ⪰ 0 and |ε| <= cap, by ADMM
// on (svec Q, ε): alternating projection onto the affine constraint set and
// onto the PSD cone.
GramSolution solve(const SOSProblem& p, const SolverConfig& cfg = {});

// Same, with c0 and c1 replaced (used for auxiliary problems sharing the
// constraint matrix).
GramSolution solve_with_targets(const SOSProblem& p, const std::vector<double>& c0, const std::vector<double>& c1,
                                double cap, const SolverConfig& cfg);

// ∞-norm of the constraint residual at (Q, ε).
double constraint_residual(const SOSProblem& p, const Eigen::MatrixXd& Q, double epsilon);
double min_eigenvalue(const Eigen::MatrixXd& Q);

// "epsilon <float>" then the lower triangle of Q row-major, one per line.
std::string write_solution(const GramSolution& s);
// Residuals are recomputed; status is Converged when both the constraint
// residual and the PSD violation are within cfg.tolerance, else Diverged.
GramSolution import_solution(const SOSProblem& p, std::string_view text, const SolverConfig& cfg = {});

}  // namespace tncert
