#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dubinspair/errors.hpp"
#include "dubinspair/model.hpp"
#include "dubinspair/pmp.hpp"

namespace dubinspair {

/// Uniform grid on [0, T]. Node times are horizon * (k / steps), never a
/// running sum, so time(steps) == horizon exactly.
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(1.0, 2) {}
  TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (steps < 2) throw std::invalid_argument("TimeGrid: steps must be at least 2");
  }

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double time(int k) const { return horizon_ * (static_cast<double>(k) / static_cast<double>(steps_)); }
  double dt(int k) const { return time(k + 1) - time(k); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  int steps_;
};

/// Nodal control values; piecewise linear in time between nodes.
struct ControlTrajectory {
  TimeGrid grid;
  std::vector<ControlPair> nodes;
};

struct StateTrajectory {
  TimeGrid grid;
  std::vector<PairState> nodes;
};

struct CostateTrajectory {
  TimeGrid grid;
  std::vector<Costate> nodes;
};

namespace detail {

template <std::size_t N>
bool all_finite(const std::array<double, N>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace detail

/// One classical Runge-Kutta-4 step. h may be negative (reverse-time
/// integration). Every stage derivative and the assembled result are checked
/// for finiteness; stage indices in NonFiniteStage are 1..4, 0 for the result.
template <std::size_t N, typename Rhs>
std::array<double, N> rk4_step(Rhs&& rhs, const std::array<double, N>& y, double t, double h) {
  std::array<double, N> k1 = rhs(t, y);
  if (!detail::all_finite(k1)) throw NonFiniteStage(1);
  std::array<double, N> stage;
  for (std::size_t i = 0; i < N; ++i) stage[i] = y[i] + 0.5 * h * k1[i];
  std::array<double, N> k2 = rhs(t + 0.5 * h, stage);
  if (!detail::all_finite(k2)) throw NonFiniteStage(2);
  for (std::size_t i = 0; i < N; ++i) stage[i] = y[i] + 0.5 * h * k2[i];
  std::array<double, N> k3 = rhs(t + 0.5 * h, stage);
  if (!detail::all_finite(k3)) throw NonFiniteStage(3);
  for (std::size_t i = 0; i < N; ++i) stage[i] = y[i] + h * k3[i];
  std::array<double, N> k4 = rhs(t + h, stage);
  if (!detail::all_finite(k4)) throw NonFiniteStage(4);
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!detail::all_finite(out)) throw NonFiniteStage(0);
  return out;
}

/// Linear interpolation of nodal controls at an arbitrary time; clamps to the
/// grid ends.
ControlPair interpolate_control(const ControlTrajectory& u, double t);

/// Linear interpolation of nodal states (used by the backward sweep's stage
/// evaluations).
PairState interpolate_state(const StateTrajectory& s, double t);

/// RK4 on the controlled dynamics, node 0 = initial. Throws
/// SeparationTooSmall with the step index at the first node whose separation
/// falls below the guard.
StateTrajectory integrate_forward(const PairState& initial, const ControlTrajectory& u,
                                  const TimeGrid& grid);

/// RK4 on the adjoint equations in reverse time from node N to node 0.
/// Stage-point states and controls come from linear interpolation of the
/// stored forward trajectory (never from re-integrating states backward).
CostateTrajectory integrate_backward(const Costate& terminal, const StateTrajectory& states,
                                     const ControlTrajectory& u, const TimeGrid& grid,
                                     const Weights& w);

struct ExtremalTrajectory {
  StateTrajectory states;
  CostateTrajectory costates;
};

/// RK4 on the 12-dimensional closed-loop extremal system.
ExtremalTrajectory integrate_extremal(const ExtendedState& start, const TimeGrid& grid,
                                      const Weights& w);

/// Controls induced by an extremal trajectory: optimal_control at each node.
ControlTrajectory induced_controls(const ExtremalTrajectory& ext, const Weights& w);

/// Trapezoidal quadrature of the running cost over the grid.
double total_cost(const StateTrajectory& states, const ControlTrajectory& u, const Weights& w);

/// Minimum over nodes of the Euclidean inter-vehicle distance.
double min_separation(const StateTrajectory& states);

/// Max-node Hamiltonian drift |H_k - H_0| scaled by 1 + |H_0|.
double hamiltonian_drift(const StateTrajectory& states, const CostateTrajectory& costates,
                         const ControlTrajectory& u, const Weights& w);

}  // namespace dubinspair
