#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dubinspair/runner.hpp"
#include "dubinspair/version.hpp"

namespace {

/// --method/--steps/--scenario/--out are shared by every subcommand.
void add_common(CLI::App* cmd, dubinspair::RunFlags& flags, std::string& method) {
  cmd->add_option("--scenario", flags.scenario_path, "scenario JSON file")->required();
  cmd->add_option("--out", flags.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--method", method, "fbsm | shooting | both (overrides the scenario)");
  cmd->add_option("--steps", flags.steps_override, "time-grid steps (overrides the scenario)");
}

int apply_method(const std::string& method, dubinspair::RunFlags& flags) {
  if (method.empty()) return 0;
  const auto m = dubinspair::method_from_name(method);
  if (!m) {
    std::fprintf(stderr, "error: --method '%s' is not one of fbsm, shooting, both\n",
                 method.c_str());
    return dubinspair::kExitInputError;
  }
  flags.method_override = *m;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal steering for a pair of planar unit-speed vehicles"};
  app.set_version_flag("--version", std::string(dubinspair::kVersion));
  app.require_subcommand(1);

  dubinspair::RunFlags solve_flags;
  solve_flags.out_dir = "out";
  std::string solve_method;
  CLI::App* solve = app.add_subcommand("solve", "solve a scenario and write artifacts");
  add_common(solve, solve_flags, solve_method);

  dubinspair::RunFlags check_flags;
  check_flags.out_dir = "out";
  std::string check_method;
  CLI::App* check = app.add_subcommand("check", "solve, then run the diagnostics table");
  add_common(check, check_flags, check_method);
  check->add_flag("--corrupt-gradient", check_flags.corrupt_gradient)->group("");

  dubinspair::SweepFlags sweep_flags;
  sweep_flags.base.out_dir = "out";
  std::string sweep_method;
  CLI::App* sweep = app.add_subcommand("sweep", "re-solve across one parameter");
  add_common(sweep, sweep_flags.base, sweep_method);
  sweep->add_option("--param", sweep_flags.param, "delta | beta | alpha | rho | horizon | wT")
      ->required();
  sweep->add_option("--values", sweep_flags.values, "comma-separated parameter values")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dubinspair::kExitOk : dubinspair::kExitInputError;
  }

  if (solve->parsed()) {
    if (const int rc = apply_method(solve_method, solve_flags)) return rc;
    return dubinspair::run_solve(solve_flags);
  }
  if (check->parsed()) {
    if (const int rc = apply_method(check_method, check_flags)) return rc;
    return dubinspair::run_check(check_flags);
  }
  if (const int rc = apply_method(sweep_method, sweep_flags.base)) return rc;
  return dubinspair::run_sweep(sweep_flags);
}
