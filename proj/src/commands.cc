#include "tncert/commands.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tncert/error.h"
#include "tncert/oracle.h"
#include "tncert/presets.h"
#include "tncert/sdp.h"
#include "tncert/sos.h"

namespace tncert {

namespace {

namespace fs = std::filesystem;

// Missing or unreadable files and bad flag combinations.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string one_line(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out += (out.empty() ? "" : "; ") + line;
  return out;
}

std::string describe_input(const InputOptions& in, const ChainComplexData& c) {
  if (in.preset) return *in.preset;
  return one_line(to_text(*c.presentation));
}

SOSMode mode_from(const RunConfig& cfg) {
  SOSMode mode;
  mode.kind = parse_mode_name(cfg.mode);
  mode.degree = cfg.degree.value_or(mode.kind == SOSKind::kOzawa ? 0 : 1);
  return mode;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.tolerance = cfg.solver_tol;
  s.max_iterations = cfg.max_iter;
  s.seed = cfg.seed;
  s.validate();
  return s;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

std::string fmt_g17(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::vector<std::pair<std::string, std::string>> run_params(const RunConfig& cfg, const SOSProblem& p) {
  return {{"half-radius", std::to_string(p.half_radius())},
          {"solver-tol", fmt_g17(cfg.solver_tol)},
          {"max-iter", std::to_string(cfg.max_iter)},
          {"seed", std::to_string(cfg.seed)},
          {"rounding-bits", std::to_string(cfg.certifier.rounding_bits)},
          {"epsilon-bits", std::to_string(cfg.certifier.epsilon_bits)},
          {"margin-floor", fmt_g17(cfg.certifier.margin_floor)},
          {"assert-resolution", cfg.assert_resolution ? "1" : "0"}};
}

bool no_certificate_error(ErrorCode code) {
  return code == ErrorCode::kRadiusTooSmall || code == ErrorCode::kPsdFailedAfterRetries ||
         code == ErrorCode::kRepairSingular;
}

std::pair<int, int> parse_degrees(const std::string& text) {
  auto number = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) throw UsageError("bad degree range '" + text + "'");
    return v;
  };
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    int k = number(text);
    return {k, k};
  }
  int a = number(std::string_view(text).substr(0, dots)), b = number(std::string_view(text).substr(dots + 2));
  if (b < a) throw UsageError("empty degree range '" + text + "'");
  return {a, b};
}

// Shared tail of certify and import: self-check, write artifacts, report.
int finish_certificate(const RepairOutcome& r, const ChainComplexData* c, const fs::path& dir, std::ostream& out,
                       std::ostream& err) {
  const Certificate& cert = r.certificate;
  if (c) {
    VerificationReport v = verify_certificate(cert, *c);
    if (!v.accepted()) {
      err << "internal self-check rejected the certificate: " << v.first_failure.value_or("?") << '\n';
      return kExitNoCertificate;
    }
  }
  fs::create_directories(dir);
  write_file(dir / "certificate.txt", serialize(cert));
  out << "certified ε̂ = " << to_string(cert.epsilon) << " (≈ " << fmt(to_double(cert.epsilon)) << ")"
      << (r.retries ? ", after " + std::to_string(r.retries) + " margin retries" : "") << '\n';
  out << "identity: " << mode_formula(cert.mode, to_string(cert.epsilon)) << " = Σᵢ pivotᵢ yᵢ*yᵢ\n";
  if (cert.truncated) out << "note: the degree is the top of a truncated complex\n";
  out << "certificate written to " << (dir / "certificate.txt").string() << '\n';
  return kExitOk;
}

}  // namespace

// One line per generator: "a = 0 1 ; 1 0", rows separated by ';'.
FiniteModule module_from_file(const std::string& path, const PresentationPtr& p) {
  std::vector<RationalMatrix> gens(p->rank());
  std::vector<bool> seen(p->rank(), false);
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) throw UsageError("module file: expected '<gen> = <rows>'");
      continue;
    }
    std::string name;
    std::istringstream(line.substr(0, eq)) >> name;
    auto it = std::find(p->generators.begin(), p->generators.end(), name);
    if (it == p->generators.end()) throw UsageError("module file: unknown generator '" + name + "'");
    std::vector<std::vector<Rational>> rows(1);
    std::istringstream body(line.substr(eq + 1));
    std::string tok;
    while (body >> tok) {
      if (tok == ";") {
        rows.emplace_back();
        continue;
      }
      try {
        rows.back().push_back(parse_rational(tok));
      } catch (const Error&) {
        throw UsageError("module file: bad entry '" + tok + "'");
      }
    }
    const std::size_t n = rows.size();
    for (const auto& r : rows)
      if (r.size() != n) throw UsageError("module file: matrix for '" + name + "' is not square");
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    const auto g = static_cast<std::size_t>(it - p->generators.begin());
    gens[g] = std::move(m);
    seen[g] = true;
  }
  for (std::size_t g = 0; g < gens.size(); ++g)
    if (!seen[g]) throw UsageError("module file: no matrix for '" + p->generators[g] + "'");
  for (const auto& m : gens)
    if (m.rows() != gens[0].rows()) throw UsageError("module file: matrices have different sizes");
  return user_module(p, std::move(gens), fs::path(path).filename().string());
}

ChainComplexData load_complex(const InputOptions& in, int min_top_degree) {
  int sources = (in.preset ? 1 : 0) + (in.presentation_file ? 1 : 0) + (in.complex_file ? 1 : 0);
  if (sources != 1) throw UsageError("give exactly one of --preset, --presentation, --complex");
  if (in.preset) return preset_complex(*in.preset, min_top_degree);
  if (in.presentation_file) return complex_for(parse_presentation(read_file(*in.presentation_file)), min_top_degree);
  return parse_complex(read_file(*in.complex_file));
}

int run_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    SOSMode mode = mode_from(cfg);
    SolverConfig scfg = solver_config(cfg);
    ChainComplexData c = load_complex(cfg.input, mode.degree + 1);
    EncodeOptions eo;
    eo.half_radius = cfg.radius;
    eo.assert_resolution = cfg.assert_resolution;
    SOSProblem p;
    try {
      p = encode(c, mode, eo);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRadiusTooSmall) throw;
      err << e.what() << '\n';
      return kExitNoCertificate;
    }
    const fs::path dir = cfg.out_dir.value_or("tncert-out");
    fs::create_directories(dir);
    write_file(dir / "complex.txt", serialize(c));
    write_file(dir / "problem.dat-s", export_sdpa(p));

    std::ostringstream summary;
    summary << "group: " << describe_input(cfg.input, c) << '\n'
            << "mode: " << mode_name(mode.kind) << ", degree " << mode.degree << '\n'
            << "complex: " << origin_name(c.origin) << ", ranks";
    for (auto m : c.ranks) summary << ' ' << m;
    summary << ", exact through degree " << c.exact_degree << '\n'
            << "half radius d = " << p.half_radius() << ", target radius 2d = " << 2 * p.half_radius()
            << ", Gram size N = " << p.gram_size() << ", constraints " << p.constraints.size() << '\n';
    out << summary.str();
    if (p.degenerate()) {
      err << "degenerate problem: no constraint involves ε, so no certificate is produced\n";
      write_file(dir / "summary.txt", summary.str() + "result: degenerate\n");
      return kExitNoCertificate;
    }

    GramSolution s = solve(p, scfg);
    write_file(dir / "solution.txt", write_solution(s));
    summary << "solver: " << status_name(s.status) << " after " << s.iterations << " iterations, numeric ε = "
            << fmt(s.epsilon) << ", constraint residual " << fmt(s.residuals.constraint) << ", PSD violation "
            << fmt(s.residuals.psd_violation) << '\n';
    out << "solver: " << status_name(s.status) << ", numeric ε = " << fmt(s.epsilon) << '\n';
    auto no_cert = [&](const std::string& why) {
      err << "no certificate at radius " << p.half_radius() << ": " << why << '\n';
      summary << "result: no certificate (" << why << ")\ntime: " << fmt(seconds_since(t0)) << " s\n";
      write_file(dir / "summary.txt", summary.str());
      return kExitNoCertificate;
    };
    if (s.status != SolveStatus::kConverged) return no_cert(std::string("solver ") + std::string(status_name(s.status)));
    if (!(s.epsilon > 0)) return no_cert("numeric optimum ε = " + fmt(s.epsilon) + " is not positive");

    RepairOutcome r;
    try {
      r = round_and_repair(s, p, cfg.certifier);
    } catch (const Error& e) {
      if (!no_certificate_error(e.code())) throw;
      return no_cert(e.what());
    }
    r.certificate.params = run_params(cfg, p);
    int code = finish_certificate(r, &c, dir, out, err);
    if (code != kExitOk) return no_cert("self-check failed");
    summary << "result: certified ε̂ = " << to_string(r.certificate.epsilon) << " (retries " << r.retries
            << ", repair size " << fmt(to_double(r.repair_norm)) << ")\n"
            << "identity: " << mode_formula(mode, to_string(r.certificate.epsilon)) << " = Σᵢ pivotᵢ yᵢ*yᵢ\n"
            << "time: " << fmt(seconds_since(t0)) << " s\n";
    write_file(dir / "summary.txt", summary.str());
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return no_certificate_error(e.code()) ? kExitNoCertificate : kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

int run_verify(const std::string& cert_path, const InputOptions& in, std::ostream& out, std::ostream& err) {
  try {
    Certificate cert;
    try {
      cert = parse_certificate(read_file(cert_path));
    } catch (const Error& e) {
      err << "malformed certificate: " << e.what() << '\n';
      return kExitMalformed;
    }
    ChainComplexData c = load_complex(in, cert.mode.degree + 1);
    out << "verifying " << mode_formula(cert.mode, to_string(cert.epsilon)) << " = Σᵢ pivotᵢ yᵢ*yᵢ\n";
    VerificationReport r;
    try {
      r = verify_certificate(cert, c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFingerprintMismatch && e.code() != ErrorCode::kConventionMismatch) throw;
      err << e.what() << '\n';
      return kExitMismatch;
    }
    out << "identity: " << (r.identity_ok ? "exact" : "FAILED") << '\n';
    if (r.identity_ok) out << "positive semidefinite: " << (r.psd_ok ? "yes" : "NO") << '\n';
    if (r.first_failure) err << *r.first_failure << '\n';
    out << (r.accepted() ? "accepted" : "rejected") << " (" << fmt(r.seconds) << " s)\n";
    return verify_exit_code(r);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::kParseError ? kExitMalformed : kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

int run_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    auto [from, to] = parse_degrees(opt.degrees);
    ChainComplexData c = load_complex(opt.input, to + 1);
    if (!c.ball->complete()) throw UsageError("the oracle needs a finite group");
    if (to > c.top_degree()) throw UsageError("degree " + std::to_string(to) + " exceeds the complex");
    const bool builtin = opt.module == "trivial" || opt.module == "reg" || opt.module == "reg0" || opt.module == "sign";
    FiniteModule V = builtin ? builtin_module(opt.module, c.ball) : module_from_file(opt.module, c.presentation);
    OracleReport rep = cross_check(c, V, from, to, opt.cap);
    out << rep.to_text();
    if (opt.json_file) write_file(*opt.json_file, rep.to_json());
    return rep.all_pass() ? kExitOk : kExitNoCertificate;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

int run_export(const RunConfig& cfg, const std::string& out_file, std::ostream& out, std::ostream& err) {
  try {
    SOSMode mode = mode_from(cfg);
    ChainComplexData c = load_complex(cfg.input, mode.degree + 1);
    EncodeOptions eo;
    eo.half_radius = cfg.radius;
    eo.assert_resolution = cfg.assert_resolution;
    std::string text = export_sdpa(encode(c, mode, eo));
    if (out_file.empty())
      out << text;
    else
      write_file(out_file, text);
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

int run_solve(const std::string& problem_file, const RunConfig& cfg, const std::string& out_file, std::ostream& out,
              std::ostream& err) {
  try {
    SOSProblem p = import_sdpa(read_file(problem_file));
    GramSolution s = solve(p, solver_config(cfg));
    std::string text = write_solution(s);
    if (out_file.empty())
      out << text;
    else
      write_file(out_file, text);
    err << "solver: " << status_name(s.status) << ", numeric ε = " << fmt(s.epsilon) << '\n';
    return s.status == SolveStatus::kConverged ? kExitOk : kExitNoCertificate;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::kParseError ? kExitMalformed : kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

int run_import(const std::string& problem_file, const std::string& solution_file, const RunConfig& cfg,
               std::ostream& out, std::ostream& err) {
  try {
    SolverConfig scfg = solver_config(cfg);
    SOSProblem p = import_sdpa(read_file(problem_file));
    GramSolution s = import_solution(p, read_file(solution_file), scfg);
    std::optional<ChainComplexData> c;
    const InputOptions& in = cfg.input;
    if (in.preset || in.presentation_file || in.complex_file) {
      c = load_complex(in, p.mode.degree + 1);
      if (fingerprint(*c) != p.fingerprint) {
        err << "problem was exported from a different complex\n";
        return kExitMismatch;
      }
    }
    if (s.status != SolveStatus::kConverged || !(s.epsilon > 0)) {
      err << "no certificate: imported solution has status " << status_name(s.status) << ", ε = " << fmt(s.epsilon)
          << '\n';
      return kExitNoCertificate;
    }
    CertifierConfig cc = cfg.certifier;
    cc.solver = scfg;
    RepairOutcome r;
    try {
      r = round_and_repair(s, p, cc);
    } catch (const Error& e) {
      if (!no_certificate_error(e.code())) throw;
      err << "no certificate: " << e.what() << '\n';
      return kExitNoCertificate;
    }
    r.certificate.params = run_params(cfg, p);
    if (!c) out << "no complex given: the certificate was not self-verified\n";
    return finish_certificate(r, c ? &*c : nullptr, cfg.out_dir.value_or("tncert-out"), out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::kParseError || e.code() == ErrorCode::kDimensionMismatch ? kExitMalformed
                                                                                           : kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

int run_check(const InputOptions& in, int min_top_degree, std::ostream& out, std::ostream& err) {
  try {
    ChainComplexData c = load_complex(in, min_top_degree);
    ComplexReport rep = check_complex(c);
    out << "fingerprint " << fingerprint(c) << ", exact through degree " << c.exact_degree << '\n' << rep.to_text();
    return rep.ok() ? kExitOk : kExitNoCertificate;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace tncert
