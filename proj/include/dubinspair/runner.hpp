#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dubinspair/scenario.hpp"
#include "dubinspair/solver.hpp"

namespace dubinspair {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitCheckFailed = 3;

struct RunFlags {
  std::filesystem::path scenario_path;
  std::filesystem::path out_dir;
  std::optional<MethodChoice> method_override;
  std::optional<int> steps_override;
  bool corrupt_gradient = false;  // fault injection: scales one adjoint-gradient entry
};

struct SweepFlags {
  RunFlags base;
  std::string param;                 // delta | beta | alpha | rho | horizon | wT
  std::vector<std::string> values;   // as written on the command line
};

/// solve: writes trajectory.csv, summary, plot.svg into out_dir.
int run_solve(const RunFlags& flags);

/// check: solves, then prints a pass/fail diagnostics table including the
/// finite-difference gradient comparison on a grid capped at 500 steps.
int run_check(const RunFlags& flags);

/// sweep: one solve per value in its own sub-directory plus sweep.csv.
int run_sweep(const SweepFlags& flags);

}  // namespace dubinspair
