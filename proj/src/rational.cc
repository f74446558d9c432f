#include "tncert/rational.h"

#include <cmath>

#include "tncert/error.h"

namespace tncert {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUndeclaredGenerator: return "UndeclaredGenerator";
    case ErrorCode::kUnreducedRelator: return "UnreducedRelator";
    case ErrorCode::kBackendRelatorViolation: return "BackendRelatorViolation";
    case ErrorCode::kBallBudgetExceeded: return "BallBudgetExceeded";
    case ErrorCode::kRadiusTooSmall: return "RadiusTooSmall";
    case ErrorCode::kBallMismatch: return "BallMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotAComplex: return "NotAComplex";
    case ErrorCode::kTruncatedDegree: return "TruncatedDegree";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRepairSingular: return "RepairSingular";
    case ErrorCode::kPsdFailedAfterRetries: return "PSDFailedAfterRetries";
    case ErrorCode::kFingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::kConventionMismatch: return "ConventionMismatch";
    case ErrorCode::kCapExceeded: return "CapExceeded";
    case ErrorCode::kNotUnitary: return "NotUnitary";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(ErrorCode::kParseError, "empty rational");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digit_before = false;
  bool digit_after = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (c == '/' && !seen_slash) {
      seen_slash = true;
    } else if (c >= '0' && c <= '9') {
      (seen_slash ? digit_after : digit_before) = true;
    } else {
      throw Error(ErrorCode::kParseError, "bad rational '" + s + "'");
    }
  }
  if (!digit_before || (seen_slash && !digit_after))
    throw Error(ErrorCode::kParseError, "bad rational '" + s + "'");
  if (s[0] == '+') s.erase(0, 1);
  Rational q;
  if (q.set_str(s, 10) != 0) throw Error(ErrorCode::kParseError, "bad rational '" + s + "'");
  if (q.get_den() == 0) throw Error(ErrorCode::kParseError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

namespace {

Rational dyadic(const mpz_class& numerator, int bits) {
  mpz_class den = 1;
  den <<= bits;
  Rational q(numerator, den);
  q.canonicalize();
  return q;
}

}  // namespace

Rational round_to_dyadic(double x, int bits) {
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite value cannot be rounded");
  Rational scaled(x);
  mpz_class den = 1;
  den <<= bits;
  scaled *= den;
  // round half away from zero
  Rational half(1, 2);
  mpz_class n;
  if (scaled >= 0) {
    Rational shifted = scaled + half;
    mpz_fdiv_q(n.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  } else {
    Rational shifted = scaled - half;
    mpz_cdiv_q(n.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  }
  return dyadic(n, bits);
}

Rational floor_to_dyadic(double x, int bits) {
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite value cannot be rounded");
  Rational scaled(x);
  mpz_class den = 1;
  den <<= bits;
  scaled *= den;
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  return dyadic(n, bits);
}

}  // namespace tncert
