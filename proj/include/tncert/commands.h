#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tncert/certifier.h"
#include "tncert/resolution.h"

namespace tncert {

// Exit statuses shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoCertificate = 1;
inline constexpr int kExitIdentity = 2;
inline constexpr int kExitPsd = 3;
inline constexpr int kExitMismatch = 4;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitMalformed = 65;

// Exactly one of the three sources.
struct InputOptions {
  std::optional<std::string> preset;
  std::optional<std::string> presentation_file;
  std::optional<std::string> complex_file;
};

struct RunConfig {
  InputOptions input;
  std::string mode = "ozawa";
  std::optional<int> degree;  // default 0 for ozawa, 1 otherwise
  std::optional<int> radius;  // half radius d of the support basis
  double solver_tol = 1e-9;
  int max_iter = 50000;
  std::uint64_t seed = 0;
  bool assert_resolution = false;
  std::optional<std::string> out_dir;
  CertifierConfig certifier;
};

// Loads the complex for a run; min_top_degree matters only when the complex
// is built from a presentation.
ChainComplexData load_complex(const InputOptions& in, int min_top_degree);

// Writes certificate.txt, complex.txt, problem.dat-s, solution.txt and
// summary.txt to the output directory. 0 certified, 1 none found, 64 usage.
int run_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// 0 accepted, 2 identity, 3 PSD, 4 fingerprint/convention, 65 malformed,
// 64 missing file.
int run_verify(const std::string& cert_path, const InputOptions& in, std::ostream& out, std::ostream& err);

struct OracleOptions {
  InputOptions input;
  std::string module = "reg0";
  std::string degrees = "0..2";  // "a..b" or a single degree
  std::optional<std::string> json_file;
  std::size_t cap = 1000000;
};

// 0 iff every verdict is PASS.
int run_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err);

// Writes the SDPA file to out_file (stdout when empty).
int run_export(const RunConfig& cfg, const std::string& out_file, std::ostream& out, std::ostream& err);

// Solves an exported problem and writes the numeric solution.
int run_solve(const std::string& problem_file, const RunConfig& cfg, const std::string& out_file, std::ostream& out,
              std::ostream& err);

// Rounds an external numeric solution of an exported problem into a
// certificate written to cfg.out_dir.
int run_import(const std::string& problem_file, const std::string& solution_file, const RunConfig& cfg,
               std::ostream& out, std::ostream& err);

// Runs the algebraic checks on a complex; 0 iff all pass.
int run_check(const InputOptions& in, int min_top_degree, std::ostream& out, std::ostream& err);

}  // namespace tncert
