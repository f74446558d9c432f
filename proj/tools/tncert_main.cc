#include <iostream>

#include "CLI11.hpp"
#include "tncert/commands.h"

namespace {

void add_input(CLI::App* app, tncert::InputOptions& in) {
  auto* preset = app->add_option("--preset", in.preset, "trivial, cyclic:<n>, z, z2, s3, free:<k>");
  auto* pres = app->add_option("--presentation", in.presentation_file, "presentation file");
  auto* cx = app->add_option("--complex", in.complex_file, "serialized chain complex");
  preset->excludes(pres)->excludes(cx);
  pres->excludes(cx);
}

void add_run(CLI::App* app, tncert::RunConfig& cfg) {
  add_input(app, cfg.input);
  app->add_option("--mode", cfg.mode, "ozawa, bracket or paren")->capture_default_str();
  app->add_option("--degree", cfg.degree, "degree k (bracket, paren)");
  app->add_option("--radius", cfg.radius, "half radius d of the support basis");
  app->add_option("--solver-tol", cfg.solver_tol)->capture_default_str();
  app->add_option("--max-iter", cfg.max_iter)->capture_default_str();
  app->add_option("--seed", cfg.seed)->capture_default_str();
  app->add_flag("--assert-resolution", cfg.assert_resolution, "certify beyond the known exact range");
  app->add_option("--rounding-bits", cfg.certifier.rounding_bits)->capture_default_str();
  app->add_option("--epsilon-bits", cfg.certifier.epsilon_bits)->capture_default_str();
  app->add_option("--margin-floor", cfg.certifier.margin_floor)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tncert: sum-of-squares certificates for property T and (T_n)"};
  app.require_subcommand(1);

  tncert::RunConfig run;
  std::string out_file, problem_file, solution_file, cert_path;

  auto* certify = app.add_subcommand("certify", "search for and write a certificate");
  add_run(certify, run);
  certify->add_option("--out", run.out_dir, "output directory (default tncert-out)");

  tncert::InputOptions verify_in;
  auto* verify = app.add_subcommand("verify", "check a certificate exactly");
  verify->add_option("certificate", cert_path)->required();
  add_input(verify, verify_in);

  tncert::OracleOptions oracle_opt;
  auto* oracle = app.add_subcommand("oracle", "compare Laplacian spectra with bar-complex cohomology");
  add_input(oracle, oracle_opt.input);
  oracle->add_option("--module", oracle_opt.module, "trivial, reg, reg0, sign, or a module file")->capture_default_str();
  oracle->add_option("--degrees", oracle_opt.degrees, "a..b")->capture_default_str();
  oracle->add_option("--json", oracle_opt.json_file, "also write the report as JSON");
  oracle->add_option("--cap", oracle_opt.cap, "bar complex size cap")->capture_default_str();

  auto* exp = app.add_subcommand("export-sdpa", "write the SDP in SDPA sparse format");
  add_run(exp, run);
  exp->add_option("--out", out_file, "output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "solve an exported problem numerically");
  solve->add_option("problem", problem_file)->required();
  solve->add_option("--solver-tol", run.solver_tol)->capture_default_str();
  solve->add_option("--max-iter", run.max_iter)->capture_default_str();
  solve->add_option("--seed", run.seed)->capture_default_str();
  solve->add_option("--out", out_file, "output file (default stdout)");

  auto* import = app.add_subcommand("import", "round an external solution into a certificate");
  import->add_option("problem", problem_file)->required();
  import->add_option("solution", solution_file)->required();
  add_run(import, run);
  import->add_option("--out", run.out_dir, "output directory (default tncert-out)");

  tncert::InputOptions check_in;
  int check_top = 0;
  auto* check = app.add_subcommand("check", "run the algebraic checks on a complex");
  add_input(check, check_in);
  check->add_option("--top-degree", check_top, "minimum top degree of the built complex");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : tncert::kExitUsage;
  }

  if (certify->parsed()) return tncert::run_certify(run, std::cout, std::cerr);
  if (verify->parsed()) return tncert::run_verify(cert_path, verify_in, std::cout, std::cerr);
  if (oracle->parsed()) return tncert::run_oracle(oracle_opt, std::cout, std::cerr);
  if (exp->parsed()) return tncert::run_export(run, out_file, std::cout, std::cerr);
  if (solve->parsed()) return tncert::run_solve(problem_file, run, out_file, std::cout, std::cerr);
  if (import->parsed()) return tncert::run_import(problem_file, solution_file, run, std::cout, std::cerr);
  if (check->parsed()) return tncert::run_check(check_in, check_top, std::cout, std::cerr);
  return tncert::kExitUsage;
}
