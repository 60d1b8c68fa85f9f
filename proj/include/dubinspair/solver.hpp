#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dubinspair/integrate.hpp"
#include "dubinspair/model.hpp"
#include "dubinspair/pmp.hpp"

namespace dubinspair {

/// Quadratic terminal penalty (w/2)|state(T) - target|^2 standing in for the
/// hard endpoint constraint inside the sweep method.
struct TerminalPenalty {
  double weight = 0.0;
  PairState target;
};

/// Geometric continuation schedule for the terminal-penalty weight.
struct PenaltySchedule {
  double initial = 1.0;
  double growth = 10.0;
  double max = 1e6;

  friend bool operator==(const PenaltySchedule&, const PenaltySchedule&) = default;
};

struct SolveOptions {
  int steps = 2000;  // grid resolution used by the solve
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  double cost_tolerance = 1e-8;  // relative stagnation threshold
  double armijo_slope = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;  // scaled per iteration as initial_step / (1 + |g|_inf)
  PenaltySchedule penalty;
  double residual_tolerance = 1e-6;  // shooting endpoint tolerance, inf-norm

  friend bool operator==(const SolveOptions&, const SolveOptions&) = default;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double final_cost = 0.0;          // running cost only, no penalty term
  Vec6 terminal_residual{};         // state(T) - target, componentwise
  double max_stationarity = 0.0;    // max over nodes of |dH/dcontrols|_inf
  double hamiltonian_drift = 0.0;   // max |H_k - H_0| / (1 + |H_0|)
  double min_separation = 0.0;
  std::string method;
};

/// Augmented cost accepted at one sweep iteration, tagged with the penalty
/// weight in force. Within one weight the accepted values never increase.
struct AcceptedStep {
  double penalty_weight = 0.0;
  double cost = 0.0;
};

struct Solution {
  BoundaryConditions bc;
  Weights weights;
  StateTrajectory states;
  CostateTrajectory costates;
  ControlTrajectory controls;
  SolveReport report;
  std::vector<AcceptedStep> accepted_costs;  // sweep method only
};

/// Checks SolveOptions invariants; returns all violations with
/// "solver."-prefixed field paths.
std::vector<Violation> validate_options(const SolveOptions& opts);

/// Running cost plus the terminal penalty for the trajectory pair.
double augmented_cost(const StateTrajectory& states, const ControlTrajectory& u,
                      const Weights& w, const TerminalPenalty& pen);

/// Deterministic sweep initialization: per vehicle, constant speed
/// (endpoint distance)/T and constant turn rate (heading change)/T.
ControlTrajectory initial_guess(const BoundaryConditions& bc, const TimeGrid& grid);

/// Discrete gradient of augmented_cost with respect to every nodal control
/// component, via one forward and one backward sweep: -(stationarity residual)
/// times the trapezoid hat weight of the node.
std::vector<std::array<double, 4>> adjoint_cost_gradient(const ControlTrajectory& u,
                                                         const BoundaryConditions& bc,
                                                         const Weights& w,
                                                         const TerminalPenalty& pen);

/// Central finite differences of augmented_cost, step 1e-6 * (1 + |value|).
/// O(8 N) integrations; intended for modest grids.
std::vector<std::array<double, 4>> fd_cost_gradient(const ControlTrajectory& u,
                                                    const BoundaryConditions& bc, const Weights& w,
                                                    const TerminalPenalty& pen);

/// Forward-backward sweep: steepest descent in control space under the
/// terminal penalty, Armijo backtracking, penalty growth on stagnation.
/// Never throws for non-convergence; the report's flag is honest.
Solution fbsm_solve(const BoundaryConditions& bc, const Weights& w, const SolveOptions& opts);

/// Single shooting over the six initial costates: Gauss-Newton on the
/// terminal-state residual with a forward-difference Jacobian and
/// backtracking damping. warm_start, when given, is tried before the
/// deterministic guess ladder.
Solution shooting_solve(const BoundaryConditions& bc, const Weights& w, const SolveOptions& opts,
                        const std::optional<Costate>& warm_start = std::nullopt);

/// Recomputes every numeric SolveReport field from the stored trajectories;
/// converged/iterations/method are copied through untouched.
SolveReport check_suite(const Solution& solution);

namespace detail {

/// Partial-pivot Gaussian elimination for the 6x6 Gauss-Newton system.
/// Returns nullopt when a pivot is numerically zero.
std::optional<Vec6> solve_linear6(std::array<Vec6, 6> a, Vec6 b);

}  // namespace detail

}  // namespace dubinspair
