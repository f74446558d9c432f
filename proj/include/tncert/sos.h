#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tncert/group_ring.h"
#include "tncert/rational.h"
#include "tncert/resolution.h"

namespace tncert {

// Normalization of Δ₀ and orientation of the Laplacians; stored with every
// problem and certificate because ε is meaningless without it.
inline constexpr std::string_view kConvention = "delta0=sum_s(2-s-s^-1);laplacian=DD*+D*D;basis=ball-order";

enum class SOSKind { kOzawa, kBracket, kParen };

struct SOSMode {
  SOSKind kind = SOSKind::kOzawa;
  int degree = 0;  // always 0 for Ozawa

  bool ideal() const { return kind != SOSKind::kBracket; }
  bool operator==(const SOSMode&) const = default;
};

std::string_view mode_name(SOSKind kind);
SOSKind parse_mode_name(std::string_view name);
// "Δ₀(Δ₁ − ε)Δ₀" style rendering of the certified identity's left side.
std::string mode_formula(SOSMode mode, const std::string& epsilon);

struct BasisEntry {
  int element = 0;  // ball index; the ring element is g (bracket) or g - e
  int row = 0;      // module coordinate
  bool operator==(const BasisEntry&) const = default;
};

struct SupportBasis {
  bool ideal = false;
  int half_radius = 0;
  std::vector<BasisEntry> entries;

  std::size_t size() const { return entries.size(); }
  // Terms of w_p as (ball index, coefficient).
  std::vector<std::pair<int, Rational>> terms(std::size_t p) const;
  bool operator==(const SupportBasis&) const = default;
};

// Rows outermost, then ball order. Ideal bases skip the identity.
SupportBasis build_support_basis(const Ball& ball_d, SOSMode mode, std::size_t m);

struct ConstraintId {
  int i = 0, j = 0, g = 0;  // block (i, j), ball index g in B_{2d}
  auto operator<=>(const ConstraintId&) const = default;
};

struct GramTerm {
  int p = 0, q = 0;  // p <= q
  Rational coeff;
  bool operator==(const GramTerm&) const = default;
};

// Σ_{p<=q} coeff·Q[p][q] = c0 + ε·c1
struct Constraint {
  ConstraintId id;
  std::vector<GramTerm> terms;
  Rational c0, c1;
  bool operator==(const Constraint&) const = default;
};

struct SOSProblem {
  SOSMode mode;
  std::size_t module_rank = 1;
  SupportBasis basis;
  std::vector<Constraint> constraints;
  Rational epsilon_cap;
  std::string fingerprint;
  std::string convention{kConvention};
  bool truncated = false;

  std::size_t gram_size() const { return basis.size(); }
  int half_radius() const { return basis.half_radius; }
  // Every ε is feasible for Q = 0 exactly when no constraint involves ε.
  bool degenerate() const;
  bool operator==(const SOSProblem&) const = default;
};

struct EncodeOptions {
  std::optional<int> half_radius;
  // Certify at degrees where exactness of the complex is not known.
  bool assert_resolution = false;
  // Permit ParenTn(0).
  bool allow_paren_zero = false;
};

struct Target {
  GroupRingMatrix c0;  // target(ε) = c0 + ε·c1
  GroupRingMatrix c1;
  int radius = 0;
  bool truncated = false;
  Rational epsilon_cap;
};

// Δ₀², -Δ₀ (Ozawa); Δ_k, -I (bracket); Δ₀Δ_kΔ₀, -Δ₀²·I (paren).
Target build_target(const ChainComplexData& c, SOSMode mode);

// Checks degree validity and exactness; throws InvalidArgument or TruncatedDegree.
void validate_mode(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt);

// Smallest half radius whose doubled ball covers the target.
int default_half_radius(const ChainComplexData& c, SOSMode mode);

SOSProblem encode(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt = {});

std::string export_sdpa(const SOSProblem& p);
SOSProblem import_sdpa(std::string_view text);

namespace serial {
SOSProblem encode(const ChainComplexData& c, SOSMode mode, const EncodeOptions& opt = {});
}  // namespace serial

}  // namespace tncert
