#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tncert/exact_linalg.h"
#include "tncert/group.h"
#include "tncert/resolution.h"

namespace tncert {

// Finite-dimensional rational representation of a finite group.
struct FiniteModule {
  std::string name;
  std::size_t dimension = 0;
  std::vector<RationalMatrix> generators;  // ρ(s), acting on column vectors
  RationalMatrix form;                     // Γ-invariant positive definite inner product
  bool is_unitary = false;                 // ρ(s)ᵀ·form·ρ(s) = form for every s
};

// Built-ins over the full ball of a finite group: "trivial", "reg" (CΓ),
// "reg0" (augmentation kernel, basis g - e), "sign" (every generator ↦ -1).
FiniteModule builtin_module(std::string_view kind, const BallPtr& full_ball);

// User matrices; relators must act trivially. Unitary means orthogonal.
FiniteModule user_module(const PresentationPtr& p, std::vector<RationalMatrix> generators, std::string name = "user");

// ρ(g) for every element of the (complete) ball.
std::vector<RationalMatrix> element_actions(const FiniteModule& V, const Ball& ball);

// Block matrix with blocks ρ(M_ij).
RationalMatrix specialize(const GroupRingMatrix& M, const std::vector<RationalMatrix>& rho, std::size_t dim);

inline constexpr std::size_t kDefaultBarCap = 1000000;

// Inhomogeneous bar complex, k <= 2, exact ranks. Throws CapExceeded when
// |Γ|^(k+1)·dim V exceeds cap.
std::size_t bar_cohomology(const Ball& full_ball, const FiniteModule& V, int k, std::size_t cap = kDefaultBarCap);
std::size_t bar_homology(const Ball& full_ball, const FiniteModule& V, int k, std::size_t cap = kDefaultBarCap);

// Sorted eigenvalues of ρ̂(Δ_k), self-adjoint for the module's form.
// Throws NotUnitary.
std::vector<double> laplacian_spectrum(const ChainComplexData& c, const FiniteModule& V, int k);

struct OracleDegree {
  int degree = 0;
  std::size_t cohomology = 0;
  std::size_t homology = 0;
  // "bar complex", or "invariants (char 0)" above the bar range
  std::string source;
  std::vector<double> spectrum;
  std::size_t kernel_dimension = 0;  // exact rank computation
  bool pass = false;
  std::string witness;
};

struct OracleReport {
  std::string group;
  std::string module;
  std::vector<OracleDegree> degrees;

  bool all_pass() const;
  std::string to_text() const;
  std::string to_json() const;
};

// Per degree: dim ker ρ̂(Δ_k) = dim H^k = dim H_k, and
// (min |spectrum| > 1e-10) ⟺ H^k = 0.
OracleReport cross_check(const ChainComplexData& c, const FiniteModule& V, int from, int to,
                         std::size_t cap = kDefaultBarCap);

}  // namespace tncert
