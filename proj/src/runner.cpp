#include "dubinspair/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "dubinspair/outputs.hpp"

namespace dubinspair {

namespace {

struct Prepared {
  ScenarioFile scenario;
  MethodChoice method = MethodChoice::Fbsm;
};

Prepared prepare(const RunFlags& flags) {
  ScenarioFile s = load_scenario(flags.scenario_path);
  if (flags.steps_override) {
    if (*flags.steps_override < 2) throw ScenarioInvalid({"--steps: must be at least 2"});
    s.steps = *flags.steps_override;
    s.solver.steps = *flags.steps_override;
  }
  const MethodChoice m = flags.method_override.value_or(s.method);
  return {std::move(s), m};
}

struct RunResult {
  Solution solution;
  bool all_converged = false;
};

/// both = fbsm, then shooting warm-started from the sweep's initial costate;
/// the shooting result provides the artifacts when it converged.
RunResult run_method(const ScenarioFile& s, MethodChoice m) {
  if (m == MethodChoice::Fbsm) {
    Solution sol = fbsm_solve(s.bc, s.weights, s.solver);
    const bool ok = sol.report.converged;
    return {std::move(sol), ok};
  }
  if (m == MethodChoice::Shooting) {
    Solution sol = shooting_solve(s.bc, s.weights, s.solver);
    const bool ok = sol.report.converged;
    return {std::move(sol), ok};
  }
  Solution sweep = fbsm_solve(s.bc, s.weights, s.solver);
  Solution shot = shooting_solve(s.bc, s.weights, s.solver, sweep.costates.nodes.front());
  const bool ok = sweep.report.converged && shot.report.converged;
  if (shot.report.converged) return {std::move(shot), ok};
  return {std::move(sweep), ok};
}

double inf_norm6(const Vec6& v) {
  double n = 0.0;
  for (const double x : v) n = std::max(n, std::abs(x));
  return n;
}

struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

void print_rows(const std::vector<CheckRow>& rows) {
  std::printf("%-24s %-24s %-24s %s\n", "check", "value", "threshold", "result");
  for (const CheckRow& r : rows)
    std::printf("%-24s %-24s %-24s %s\n", r.name.c_str(), format_double(r.value).c_str(),
                format_double(r.threshold).c_str(), r.pass ? "PASS" : "FAIL");
}

/// Largest node-wise gap between the same vehicle channel of two solutions,
/// over states and controls.
double channel_difference(const Solution& x, const Solution& y, bool vehicle_a) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.states.nodes.size(); ++k) {
    const VehicleState& xs = vehicle_a ? x.states.nodes[k].a : x.states.nodes[k].b;
    const VehicleState& ys = vehicle_a ? y.states.nodes[k].a : y.states.nodes[k].b;
    d = std::max(d, std::abs(xs.pos1 - ys.pos1));
    d = std::max(d, std::abs(xs.pos2 - ys.pos2));
    d = std::max(d, std::abs(xs.heading - ys.heading));
    const ControlPair& xc = x.controls.nodes[k];
    const ControlPair& yc = y.controls.nodes[k];
    const double du1 = vehicle_a ? xc.u1 - yc.u1 : xc.v1 - yc.v1;
    const double du2 = vehicle_a ? xc.u2 - yc.u2 : xc.v2 - yc.v2;
    d = std::max(d, std::abs(du1));
    d = std::max(d, std::abs(du2));
  }
  return d;
}

Solution solve_like(const ScenarioFile& s, const BoundaryConditions& bc, MethodChoice m) {
  if (m == MethodChoice::Shooting) return shooting_solve(bc, s.weights, s.solver);
  return fbsm_solve(bc, s.weights, s.solver);
}

}  // namespace

int run_solve(const RunFlags& flags) {
  try {
    const Prepared p = prepare(flags);
    RunResult r = run_method(p.scenario, p.method);
    const std::uint64_t hash = scenario_hash(p.scenario);
    const std::string summary = summary_text(r.solution, hash);
    write_file(flags.out_dir / "trajectory.csv", trajectory_csv(r.solution));
    write_file(flags.out_dir / "summary.txt", summary);
    write_file(flags.out_dir / "plot.svg", trajectory_svg(r.solution));
    std::cout << summary;
    return r.all_converged ? kExitOk : kExitNotConverged;
  } catch (const ScenarioInvalid& e) {
    for (const std::string& m : e.violations()) std::cerr << "error: " << m << "\n";
    return kExitInputError;
  } catch (const SeparationTooSmall& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const NonFiniteStage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int run_check(const RunFlags& flags) {
  Prepared p;
  try {
    p = prepare(flags);
  } catch (const ScenarioInvalid& e) {
    for (const std::string& m : e.violations()) std::cerr << "error: " << m << "\n";
    return kExitInputError;
  }
  try {
    const RunResult r = run_method(p.scenario, p.method);
    const Solution& sol = r.solution;
    const SolveReport& rep = sol.report;
    const bool shooting = rep.method == "shooting";
    const SolveOptions& opts = p.scenario.solver;

    std::vector<CheckRow> rows;
    const auto at_most = [&](const char* name, double value, double thr) {
      rows.push_back({name, value, thr, value <= thr});
    };
    const auto above = [&](const char* name, double value, double thr) {
      rows.push_back({name, value, thr, value > thr});
    };

    rows.push_back({"converged", r.all_converged ? 1.0 : 0.0, 1.0, r.all_converged});
    at_most("terminal_residual", inf_norm6(rep.terminal_residual),
            shooting ? opts.residual_tolerance : 1e-2);
    at_most("max_stationarity", rep.max_stationarity,
            shooting ? 1e-9 : opts.gradient_tolerance);
    // RK4 drift scales as h^4; anchor the bound at the N = 4000 figure
    const double steps = static_cast<double>(p.scenario.steps);
    const double drift_bound =
        shooting ? 1e-6 * std::max(1.0, std::pow(4000.0 / steps, 4)) : 1e-3;
    at_most("hamiltonian_drift", rep.hamiltonian_drift, drift_bound);
    above("min_separation", rep.min_separation, 0.0);

    {
      const SolveReport again = check_suite(sol);
      double diff = std::abs(again.final_cost - rep.final_cost);
      for (int i = 0; i < 6; ++i)
        diff = std::max(diff, std::abs(again.terminal_residual[i] - rep.terminal_residual[i]));
      diff = std::max(diff, std::abs(again.max_stationarity - rep.max_stationarity));
      diff = std::max(diff, std::abs(again.hamiltonian_drift - rep.hamiltonian_drift));
      diff = std::max(diff, std::abs(again.min_separation - rep.min_separation));
      at_most("report_consistency", diff, 0.0);
    }

    {
      // adjoint-vs-FD gradient agreement on a grid capped at 500 steps, at
      // the sweep's starting point (the residual there is far from zero)
      const int coarse = std::min(p.scenario.steps, 500);
      const TimeGrid grid(p.scenario.bc.horizon, coarse);
      const ControlTrajectory u0 = initial_guess(p.scenario.bc, grid);
      const TerminalPenalty pen{opts.penalty.initial, p.scenario.bc.final};
      auto adj = adjoint_cost_gradient(u0, p.scenario.bc, p.scenario.weights, pen);
      if (flags.corrupt_gradient) {
        std::size_t bk = 0;
        int bi = 0;
        double biggest = -1.0;
        for (std::size_t k = 0; k < adj.size(); ++k)
          for (int i = 0; i < 4; ++i)
            if (std::abs(adj[k][i]) > biggest) {
              biggest = std::abs(adj[k][i]);
              bk = k;
              bi = i;
            }
        adj[bk][bi] *= 2.0;
      }
      const auto fd = fd_cost_gradient(u0, p.scenario.bc, p.scenario.weights, pen);
      double dot = 0.0;
      double na = 0.0;
      double nf = 0.0;
      double diff = 0.0;
      for (std::size_t k = 0; k < adj.size(); ++k) {
        for (int i = 0; i < 4; ++i) {
          dot += adj[k][i] * fd[k][i];
          na += adj[k][i] * adj[k][i];
          nf += fd[k][i] * fd[k][i];
          const double d = adj[k][i] - fd[k][i];
          diff += d * d;
        }
      }
      const double cosine = dot / (std::sqrt(na) * std::sqrt(nf));
      const double rel = std::sqrt(diff) / std::sqrt(nf);
      above("gradient_cosine", cosine, 0.999);
      // the adjoint/discrete mismatch shrinks with h; loosen pro rata below N=500
      at_most("gradient_rel_l2", rel, 5e-3 * (500.0 / coarse));
    }

    if (p.scenario.weights.rho == 0.0) {
      // with no repulsion the problem decouples: each vehicle solved alone
      // (partnered with a motionless ghost at the origin) must reproduce its
      // channel of the pair solution
      const VehicleState origin{0.0, 0.0, 0.0};
      BoundaryConditions alone_a = p.scenario.bc;
      alone_a.initial.b = origin;
      alone_a.final.b = origin;
      BoundaryConditions alone_b = p.scenario.bc;
      alone_b.initial.a = origin;
      alone_b.final.a = origin;
      const MethodChoice m = shooting ? MethodChoice::Shooting : MethodChoice::Fbsm;
      const Solution sa = solve_like(p.scenario, alone_a, m);
      const Solution sb = solve_like(p.scenario, alone_b, m);
      const double d =
          std::max(channel_difference(sol, sa, true), channel_difference(sol, sb, false));
      at_most("decoupling", d, 1e-4);
    }

    print_rows(rows);
    const bool all = std::all_of(rows.begin(), rows.end(), [](const CheckRow& x) { return x.pass; });
    return all ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

int run_sweep(const SweepFlags& flags) {
  static constexpr const char* kParams[] = {"delta", "beta", "alpha", "rho", "horizon", "wT"};
  const bool known = std::any_of(std::begin(kParams), std::end(kParams),
                                 [&](const char* s) { return flags.param == s; });
  if (!known) {
    std::cerr << "error: --param must be one of delta, beta, alpha, rho, horizon, wT\n";
    return kExitInputError;
  }
  if (flags.values.empty()) {
    std::cerr << "error: --values must list at least one number\n";
    return kExitInputError;
  }
  std::vector<std::pair<std::string, double>> values;
  for (const std::string& tok : flags.values) {
    double v = 0.0;
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      std::cerr << "error: --values entry '" << tok << "' is not a number\n";
      return kExitInputError;
    }
    values.emplace_back(tok, v);
  }

  Prepared base;
  try {
    base = prepare(flags.base);
  } catch (const ScenarioInvalid& e) {
    for (const std::string& m : e.violations()) std::cerr << "error: " << m << "\n";
    return kExitInputError;
  }

  std::string csv = "value,final_cost,min_separation,terminal_residual_norm,iterations,converged\n";
  bool all_ok = true;
  for (const auto& [token, v] : values) {
    ScenarioFile pt = base.scenario;
    if (flags.param == "delta") pt.weights.delta = v;
    else if (flags.param == "beta") pt.weights.beta = v;
    else if (flags.param == "alpha") pt.weights.alpha = v;
    else if (flags.param == "rho") pt.weights.rho = v;
    else if (flags.param == "horizon") pt.bc.horizon = v;
    else {
      pt.solver.penalty.initial = v;  // wT: pin the schedule to a single weight
      pt.solver.penalty.max = v;
    }
    const std::filesystem::path dir = flags.base.out_dir / (flags.param + "_" + token);
    csv += token;
    try {
      const RunResult r = run_method(pt, base.method);
      const std::uint64_t hash = scenario_hash(pt);
      write_file(dir / "trajectory.csv", trajectory_csv(r.solution));
      write_file(dir / "summary.txt", summary_text(r.solution, hash));
      write_file(dir / "plot.svg", trajectory_svg(r.solution));
      const SolveReport& rep = r.solution.report;
      csv += "," + format_double(rep.final_cost);
      csv += "," + format_double(rep.min_separation);
      csv += "," + format_double(inf_norm6(rep.terminal_residual));
      csv += "," + std::to_string(rep.iterations);
      csv += std::string(",") + (rep.converged ? "true" : "false") + "\n";
      all_ok = all_ok && r.all_converged;
    } catch (const std::exception& e) {
      std::cerr << "point " << token << " failed: " << e.what() << "\n";
      csv += ",nan,nan,nan,0,false\n";
      all_ok = false;
    }
  }
  try {
    write_file(flags.base.out_dir / "sweep.csv", csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  std::cout << csv;
  return all_ok ? kExitOk : kExitNotConverged;
}

}  // namespace dubinspair
