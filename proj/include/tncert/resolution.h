#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tncert/group.h"
#include "tncert/group_ring.h"

namespace tncert {

enum class ComplexOrigin { kPresentationComplex, kCyclicPeriodic, kUserSupplied };

std::string_view origin_name(ComplexOrigin origin);

// Truncated based free resolution P_K -> ... -> P_0 -> Q.
//
// Differentials are stored in the m_{k-1} x m_k layout: column j of d_k holds
// the image of the basis vector e_j of P_k, with module elements written as
// row vectors over QΓ and ring scalars acting on the left. Composition is
// therefore computed on the transposes ("action matrices") D_k = d_k^T:
// the complex condition reads D_{k+1} D_k = 0.
struct ChainComplexData {
  PresentationPtr presentation;
  BallPtr ball;  // every differential entry is supported here
  std::vector<std::size_t> ranks;
  std::vector<GroupRingMatrix> differentials;  // differentials[k-1] = d_k
  ComplexOrigin origin = ComplexOrigin::kUserSupplied;
  // P_{K+1} = 0 is genuine (not a truncation), e.g. free groups.
  bool terminal = false;
  // Largest k for which the complex is known to be exact at P_k.
  int exact_degree = 0;

  int top_degree() const { return static_cast<int>(differentials.size()); }
  const GroupRingMatrix& d(int k) const { return differentials.at(k - 1); }
  // D_k = d_k^T (m_k x m_{k-1}); row j is d_k(e_j).
  GroupRingMatrix action(int k) const;
};

// Fox derivative ∂w/∂s, evaluated in Γ and indexed in ball.
GroupRingElement fox_derivative(const FreeWord& w, int s, const BallPtr& ball);

// Ranks (1, |S|, |R|), d_1 = (s - e)_s, d_2[s][r] = ∂r/∂s.
ChainComplexData build_presentation_complex(const PresentationPtr& p, const BallPtr& ball);

// d_odd = t - e, d_even = N = Σ t^i, all ranks 1. ball must be the full group.
ChainComplexData cyclic_resolution(int n, int top_degree, const BallPtr& ball);

// Appends d_{K+1} (given in the m_K x m_{K+1} layout). Throws NotAComplex
// naming the first nonzero entry of the composition, or ShapeMismatch.
ChainComplexData attach_user_differential(const ChainComplexData& c, int k, const GroupRingMatrix& dk);

// Finite groups only: appends differentials whose rows generate the kernel of
// the top differential, until the top degree reaches `top_degree`.
ChainComplexData extend_finite_resolution(const ChainComplexData& c, int top_degree);

// For finite groups, the largest k with exactness at P_0..P_k, computed by
// exact rank counts in the regular representation.
int exact_degree_finite(const ChainComplexData& c);

struct LaplacianMatrix {
  int degree = 0;
  GroupRingMatrix matrix;
  int support_radius = 0;
  // d_{k+1} was missing and the complex is not terminal.
  bool truncated = false;
};

// Radius of a ball large enough to hold Δ_k.
int laplacian_radius(const ChainComplexData& c, int k);

// Δ_k = D_k D_k^* + D_{k+1}^* D_{k+1}; in particular Δ_0 = Σ_{s ∈ S}(2 - s - s^-1).
LaplacianMatrix laplacian(const ChainComplexData& c, int k, const BallPtr& out_ball);
// Same, enumerating the smallest sufficient ball.
LaplacianMatrix laplacian(const ChainComplexData& c, int k);

// The ball of the given radius for the complex's group (the full group when
// the complex ball is already complete).
BallPtr ball_for(const ChainComplexData& c, int radius);

struct CheckItem {
  std::string name;
  bool passed = true;
  std::string witness;
};

struct ComplexReport {
  std::vector<CheckItem> items;
  bool ok() const;
  std::string to_text() const;
};

ComplexReport check_complex(const ChainComplexData& c);

std::string serialize(const ChainComplexData& c);
ChainComplexData parse_complex(std::string_view text);
// FNV-1a 64 of the serialization, as 16 hex digits.
std::string fingerprint(const ChainComplexData& c);

// Word for a ball element, "e" for the identity.
std::string element_name(const Ball& ball, int index);

}  // namespace tncert
