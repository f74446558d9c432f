// One line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "test_support.h"
#include "tncert/certifier.h"
#include "tncert/commands.h"
#include "tncert/error.h"
#include "tncert/oracle.h"
#include "tncert/presets.h"
#include "tncert/sdp.h"
#include "tncert/sos.h"

using namespace tncert;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

fs::path workdir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tncert-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int certify_preset(const std::string& preset, const std::string& mode, std::optional<int> degree,
                   const fs::path& out, std::uint64_t seed = 0, std::optional<int> radius = std::nullopt,
                   CertifierConfig cc = {}) {
  RunConfig cfg;
  cfg.input.preset = preset;
  cfg.mode = mode;
  cfg.degree = degree;
  cfg.radius = radius;
  cfg.seed = seed;
  cfg.out_dir = out.string();
  cfg.certifier = cc;
  std::ostringstream sink;
  return run_certify(cfg, sink, sink);
}

int verify_files(const fs::path& cert, const fs::path& complex) {
  InputOptions in;
  in.complex_file = complex.string();
  std::ostringstream sink;
  return run_verify(cert.string(), in, sink, sink);
}

Verdict criterion1() {
  auto t0 = Clock::now();
  int total = 0, failed = 0;
  std::string first;
  for (const auto& name : testing::identity_presets())
    for (const auto& r : testing::identity_suite(name, 2024)) {
      ++total;
      if (!r.ok) {
        ++failed;
        if (first.empty()) first = r.name + " (" + r.witness + ")";
      }
    }
  double s = since(t0);
  bool ok = failed == 0 && s < 10;
  return {ok, std::to_string(total - failed) + "/" + std::to_string(total) + " identities exact, " + fmt(s) +
                  " s (limit 10 s)" + (first.empty() ? "" : "; first failure: " + first)};
}

// Certifies on a preset and checks ε̂ against [lo, hi] and the verifier.
Verdict certify_and_check(const std::string& preset, const std::string& mode, std::optional<int> degree,
                          const Rational& lo, const Rational& hi, double limit, const std::string& tag) {
  auto t0 = Clock::now();
  fs::path dir = workdir() / tag;
  int code = certify_preset(preset, mode, degree, dir);
  double s = since(t0);
  if (code != 0) return {false, tag + ": certify exited " + std::to_string(code)};
  Certificate cert = parse_certificate(slurp(dir / "certificate.txt"));
  int vcode = verify_files(dir / "certificate.txt", dir / "complex.txt");
  bool ok = cert.epsilon >= lo && cert.epsilon <= hi && vcode == 0 && s < limit;
  return {ok, tag + ": ε̂ = " + to_string(cert.epsilon) + " ≈ " + fmt(to_double(cert.epsilon)) + ", verify exit " +
                  std::to_string(vcode) + ", " + fmt(s) + " s (limit " + fmt(limit) + " s)"};
}

Verdict criterion2() { return certify_and_check("cyclic:3", "ozawa", std::nullopt, Rational(5, 2), 3, 30, "c2"); }

Verdict criterion3() {
  Verdict a = certify_and_check("cyclic:3", "bracket", 1, 2, 3, 60, "bracket1");
  Verdict b = certify_and_check("cyclic:3", "bracket", 2, 2, 3, 60, "bracket2");
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Verdict criterion4() {
  auto t0 = Clock::now();
  std::string codes;
  bool ok = true;
  for (int d = 1; d <= 3; ++d) {
    int code = certify_preset("z", "ozawa", std::nullopt, workdir() / ("z" + std::to_string(d)), 0, d);
    codes += (d > 1 ? "," : "") + std::to_string(code);
    ok = ok && code == 1;
  }
  // Fuzz: random margins and seeds through the CLI path, and the rounding
  // path forced on the numeric output (claimed converged, ε pushed up).
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> log_margin(-12, -2), log_factor(-1, 2), push(0, 0.5);
  std::uniform_int_distribution<int> bits(16, 60);
  int emitted = 0, accepted = 0;
  auto complex = preset_complex("z");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    int d = 1 + static_cast<int>(seed % 3);
    CertifierConfig cc;
    cc.margin_floor = std::pow(10.0, log_margin(rng));
    cc.margin_factor = std::pow(10.0, log_factor(rng));
    cc.rounding_bits = bits(rng);
    cc.max_retries = 1 + static_cast<int>(seed % 8);
    fs::path dir = workdir() / ("zfuzz" + std::to_string(seed));
    if (certify_preset("z", "ozawa", std::nullopt, dir, seed, d, cc) != 1) ++emitted;
    if (fs::exists(dir / "certificate.txt")) {
      ++emitted;
      if (verify_files(dir / "certificate.txt", dir / "complex.txt") == 0) ++accepted;
    }

    EncodeOptions eo;
    eo.half_radius = d;
    SOSProblem p = encode(complex, {SOSKind::kOzawa, 0}, eo);
    SolverConfig sc;
    sc.seed = seed;
    sc.max_iterations = 5000;
    GramSolution s = solve(p, sc);
    s.status = SolveStatus::kConverged;
    s.epsilon = std::max(s.epsilon, 0.0) + push(rng);
    cc.solver = sc;
    try {
      RepairOutcome r = round_and_repair(s, p, cc);
      ++emitted;
      if (verify_certificate(r.certificate, complex).accepted()) ++accepted;
    } catch (const Error&) {
    }
  }
  ok = ok && emitted == 0 && accepted == 0;
  return {ok, "exit codes at d=1,2,3: " + codes + "; fuzz over 100 seeds: " + std::to_string(emitted) +
                  " certificates emitted, " + std::to_string(accepted) + " accepted, " + fmt(since(t0)) + " s"};
}

Verdict criterion5() {
  auto t0 = Clock::now();
  int cases = 0, failed = 0;
  std::string first;
  for (const std::string name : {"cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5", "cyclic:6", "s3"}) {
    auto c = preset_complex(name, 3);
    auto rep = cross_check(c, builtin_module("reg0", c.ball), 0, 2);
    for (const auto& d : rep.degrees) {
      ++cases;
      // the two equivalences, re-evaluated here from the raw numbers
      double min_abs = INFINITY;
      for (double v : d.spectrum) min_abs = std::min(min_abs, std::abs(v));
      bool ok = d.kernel_dimension == d.cohomology && (min_abs > 1e-10) == (d.cohomology == 0) && d.pass;
      if (!ok) {
        ++failed;
        if (first.empty()) first = name + " degree " + std::to_string(d.degree) + ": " + d.witness;
      }
    }
  }
  double s = since(t0);
  return {failed == 0 && s < 60, std::to_string(cases - failed) + "/" + std::to_string(cases) + " cases agree, " +
                                     fmt(s) + " s (limit 60 s)" + (first.empty() ? "" : "; " + first)};
}

// One well-formed single-field edit and the exit code it must produce.
struct Tamper {
  std::string text;
  int expected;
  std::string field;
};

Tamper tamper(const Certificate& base, std::size_t ball_size, std::mt19937_64& rng) {
  Certificate c = base;
  std::uniform_int_distribution<int> which(0, 10);
  auto other = [&](int current, int lo, int hi) {
    std::uniform_int_distribution<int> u(lo, hi);
    int v;
    do v = u(rng);
    while (v == current);
    return v;
  };
  auto nonzero = [&] {
    Rational q;
    do q = testing::random_rational(rng) / (1 << std::uniform_int_distribution<int>(0, 40)(rng));
    while (q == 0);
    return q;
  };
  switch (which(rng)) {
    case 0:
      c.epsilon += nonzero();
      return {serialize(c), 2, "epsilon"};
    case 1: {
      std::uniform_int_distribution<std::size_t> u(0, c.gram.rows() - 1);
      std::size_t i = u(rng), j = u(rng);
      Rational q = c.gram(i, j) + nonzero();
      c.gram(i, j) = c.gram(j, i) = q;
      return {serialize(c), 2, "gram"};
    }
    case 2:
      c.mode.kind = static_cast<SOSKind>(other(static_cast<int>(c.mode.kind), 0, 2));
      return {serialize(c), 2, "mode"};
    case 3:
      c.mode.degree = other(c.mode.degree, 0, 4);
      return {serialize(c), 2, "degree"};
    case 4: {
      std::uniform_int_distribution<std::size_t> u(0, c.basis.size() - 1);
      auto& e = c.basis.entries[u(rng)];
      e.element = other(e.element, 0, static_cast<int>(ball_size) - 1);
      return {serialize(c), 2, "basis element"};
    }
    case 5: {
      std::uniform_int_distribution<std::size_t> u(0, c.basis.size() - 1);
      auto& e = c.basis.entries[u(rng)];
      e.row = other(e.row, 0, static_cast<int>(c.module_rank));
      return {serialize(c), 2, "basis row"};
    }
    case 6:
      c.basis.half_radius = other(c.basis.half_radius, 0, 4);
      return {serialize(c), 2, "half radius"};
    case 7:
      c.module_rank = other(static_cast<int>(c.module_rank), 1, 3);
      return {serialize(c), 2, "module rank"};
    case 8:
      c.truncated = !c.truncated;
      return {serialize(c), 2, "truncated"};
    case 9: {
      std::string f;
      do {
        f.clear();
        for (int i = 0; i < 16; ++i) f += "0123456789abcdef"[std::uniform_int_distribution<int>(0, 15)(rng)];
      } while (f == c.fingerprint);
      c.fingerprint = f;
      return {serialize(c), 4, "fingerprint"};
    }
    default: {
      std::string& s = c.convention;
      std::size_t pos = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
      char ch = s[pos] == 'x' ? 'y' : 'x';
      s[pos] = ch;
      return {serialize(c), 4, "convention"};
    }
  }
}

Verdict criterion6() {
  auto t0 = Clock::now();
  fs::path dir = workdir() / "tamper";
  if (certify_preset("s3", "bracket", 1, dir) != 0) return {false, "could not produce the base certificate"};
  Certificate base = parse_certificate(slurp(dir / "certificate.txt"));
  if (verify_files(dir / "certificate.txt", dir / "complex.txt") != 0) return {false, "base certificate rejected"};
  std::size_t ball_size = enumerate_ball(preset_presentation("s3"), Ball::kFull)->size();
  std::mt19937_64 rng(6);
  int wrong = 0;
  std::map<std::string, int> per_field;
  std::string first;
  for (int i = 0; i < 1000; ++i) {
    Tamper t = tamper(base, ball_size, rng);
    ++per_field[t.field];
    fs::path f = dir / "tampered.txt";
    spit(f, t.text);
    int code = verify_files(f, dir / "complex.txt");
    if (code != t.expected) {
      ++wrong;
      if (first.empty())
        first = t.field + " edit gave exit " + std::to_string(code) + ", expected " + std::to_string(t.expected);
    }
  }
  std::string fields;
  for (const auto& [k, v] : per_field) fields += (fields.empty() ? "" : ", ") + k + " " + std::to_string(v);
  return {wrong == 0, std::to_string(1000 - wrong) + "/1000 rejected with the expected code (" + fields + "), " +
                          fmt(since(t0)) + " s" + (first.empty() ? "" : "; " + first)};
}

Verdict criterion7() {
  fs::path a = workdir() / "det-a", b = workdir() / "det-b";
  int ca = certify_preset("cyclic:3", "ozawa", std::nullopt, a, 7);
  int cb = certify_preset("cyclic:3", "ozawa", std::nullopt, b, 7);
  if (ca != 0 || cb != 0) return {false, "certify failed"};
  std::string x = slurp(a / "certificate.txt"), y = slurp(b / "certificate.txt");
  return {x == y, x == y ? "certificates byte-identical (" + std::to_string(x.size()) + " bytes)" : "certificates differ"};
}

Verdict criterion8() {
  std::mt19937_64 rng(8);
  int same = 0;
  for (int i = 0; i < 20; ++i) {
    SOSProblem p = testing::random_encoding(rng).problem;
    if (import_sdpa(export_sdpa(p)) == p) ++same;
  }
  return {same == 20, std::to_string(same) + "/20 encodings survive export and import unchanged"};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  bool all = true;
  for (const auto& [n, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
