#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tncert/exact_linalg.h"
#include "tncert/resolution.h"
#include "tncert/sdp.h"
#include "tncert/sos.h"

namespace tncert {

struct CertifierConfig {
  int rounding_bits = 48;       // Gram entries rounded to denominator 2^b
  int epsilon_bits = 20;        // ε̂ rounded down to denominator 2^b
  double margin_floor = 1e-7;   // μ = margin_factor·residual + margin_floor
  double margin_factor = 10;
  int max_retries = 8;          // each retry multiplies the margin by 10
  SolverConfig solver;          // for the auxiliary order-unit solve
};

struct Certificate {
  SOSMode mode;
  Rational epsilon;
  std::size_t module_rank = 1;
  SupportBasis basis;
  RationalMatrix gram;
  std::string fingerprint;
  std::string convention{kConvention};
  bool truncated = false;
  // Provenance: the parameters of the run that produced the certificate.
  std::vector<std::pair<std::string, std::string>> params;

  bool operator==(const Certificate&) const = default;
};

struct RepairOutcome {
  Certificate certificate;
  int retries = 0;        // 0 when the first ε̂ was accepted
  Rational repair_norm;   // max |change| applied by the exact repair
  bool order_unit_definite = false;
};

// Rounds a converged numeric solution to an exactly verified certificate,
// retreating ε̂ when the exact PSD test fails. Throws RepairSingular or
// PsdFailedAfterRetries.
RepairOutcome round_and_repair(const GramSolution& s, const SOSProblem& p, const CertifierConfig& cfg = {});

// Exact repair at a given rational ε: adjusts pivot variables of `gram` so
// that every constraint of p holds exactly. Returns the max |adjustment|.
Rational repair_exactly(const SOSProblem& p, const Rational& epsilon, RationalMatrix& gram);

// Certificate from exact data (no rounding, no retreat).
Certificate make_certificate(const SOSProblem& p, const Rational& epsilon, RationalMatrix gram);

struct VerificationReport {
  bool identity_ok = false;
  bool psd_ok = false;
  Rational epsilon;
  std::optional<std::string> first_failure;
  double seconds = 0;

  bool accepted() const { return identity_ok && psd_ok; }
};

// Recomputes the target from the complex, expands the Gram form exactly and
// runs an exact LDLᵀ. Throws FingerprintMismatch / ConventionMismatch.
VerificationReport verify_certificate(const Certificate& cert, const ChainComplexData& c);

// 0 accepted, 2 identity failure, 3 PSD failure.
int verify_exit_code(const VerificationReport& r);

// Σ_{p,q} Q[p][q] w_p* w_q placed in block (row_p, row_q), over out_ball.
GroupRingMatrix expand_gram(const SupportBasis& basis, std::size_t m, const RationalMatrix& gram, const BallPtr& out_ball);

namespace serial {
GroupRingMatrix expand_gram(const SupportBasis& basis, std::size_t m, const RationalMatrix& gram, const BallPtr& out_ball);
}  // namespace serial

struct Factor {
  Rational pivot;
  GroupRingMatrix y;  // 1 x m
};

// Σ pivot_i y_i* y_i equals the target at the certified ε.
std::vector<Factor> extract_factors(const Certificate& cert, const BallPtr& ball);

// Gram of a positive semidefinite form whose expansion is -c1 (I for
// bracket, Δ₀ for Ozawa, Δ₀²·I for paren), built in closed form.
RationalMatrix order_unit_gram(const SOSProblem& p, const ChainComplexData& c);

// Certificate at a smaller ε' obtained by adding (ε - ε')·U to the Gram.
Certificate retreat_certificate(const Certificate& cert, const Rational& new_epsilon, const RationalMatrix& order_unit);

std::string serialize(const Certificate& cert);
// Throws ParseError on malformed or non-canonical input.
Certificate parse_certificate(std::string_view text);

}  // namespace tncert
