#include "dubinspair/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace dubinspair {

namespace {

/// Index of the grid interval containing t, clamped to [0, steps-1].
int interval_index(const TimeGrid& g, double t) {
  int k = static_cast<int>(std::floor((t / g.horizon()) * g.steps()));
  k = std::clamp(k, 0, g.steps() - 1);
  while (k > 0 && t < g.time(k)) --k;
  while (k < g.steps() - 1 && t > g.time(k + 1)) ++k;
  return k;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

ControlPair lerp(const ControlPair& a, const ControlPair& b, double th) {
  const double om = 1.0 - th;
  return {om * a.u1 + th * b.u1, om * a.u2 + th * b.u2, om * a.v1 + th * b.v1,
          om * a.v2 + th * b.v2};
}

PairState lerp(const PairState& a, const PairState& b, double th) {
  const double om = 1.0 - th;
  return {{om * a.a.pos1 + th * b.a.pos1, om * a.a.pos2 + th * b.a.pos2,
           om * a.a.heading + th * b.a.heading},
          {om * a.b.pos1 + th * b.b.pos1, om * a.b.pos2 + th * b.b.pos2,
           om * a.b.heading + th * b.b.heading}};
}

void require_grid(const TimeGrid& grid, const TimeGrid& other, std::size_t count) {
  if (!(grid == other)) throw std::invalid_argument("trajectory grids do not match");
  if (count != static_cast<std::size_t>(grid.nodes()))
    throw std::invalid_argument("trajectory node count does not match its grid");
}

}  // namespace

ControlPair interpolate_control(const ControlTrajectory& u, double t) {
  require_grid(u.grid, u.grid, u.nodes.size());
  const int k = interval_index(u.grid, t);
  const double th = clamp01((t - u.grid.time(k)) / u.grid.dt(k));
  return lerp(u.nodes[k], u.nodes[k + 1], th);
}

PairState interpolate_state(const StateTrajectory& s, double t) {
  require_grid(s.grid, s.grid, s.nodes.size());
  const int k = interval_index(s.grid, t);
  const double th = clamp01((t - s.grid.time(k)) / s.grid.dt(k));
  return lerp(s.nodes[k], s.nodes[k + 1], th);
}

StateTrajectory integrate_forward(const PairState& initial, const ControlTrajectory& u,
                                  const TimeGrid& grid) {
  require_grid(grid, u.grid, u.nodes.size());
  {
    const double d2 = separation_sq(initial);
    if (!(d2 >= kSeparationGuardSq)) throw SeparationTooSmall(d2, 0);
  }
  StateTrajectory out{grid, {}};
  out.nodes.reserve(static_cast<std::size_t>(grid.nodes()));
  out.nodes.push_back(initial);
  Vec6 y = to_array(initial);
  for (int k = 0; k < grid.steps(); ++k) {
    const double t0 = grid.time(k);
    const double h = grid.dt(k);
    const ControlPair& ca = u.nodes[static_cast<std::size_t>(k)];
    const ControlPair& cb = u.nodes[static_cast<std::size_t>(k) + 1];
    auto rhs = [&](double t, const Vec6& x) {
      return dynamics_rhs(pair_state_from_array(x), lerp(ca, cb, clamp01((t - t0) / h)));
    };
    y = rk4_step(rhs, y, t0, h);
    const PairState s = pair_state_from_array(y);
    const double d2 = separation_sq(s);
    if (!(d2 >= kSeparationGuardSq)) throw SeparationTooSmall(d2, k + 1);
    out.nodes.push_back(s);
  }
  return out;
}

CostateTrajectory integrate_backward(const Costate& terminal, const StateTrajectory& states,
                                     const ControlTrajectory& u, const TimeGrid& grid,
                                     const Weights& w) {
  require_grid(grid, states.grid, states.nodes.size());
  require_grid(grid, u.grid, u.nodes.size());
  CostateTrajectory out{grid, std::vector<Costate>(static_cast<std::size_t>(grid.nodes()))};
  out.nodes.back() = terminal;
  Vec6 p = to_array(terminal);
  for (int k = grid.steps() - 1; k >= 0; --k) {
    const double t0 = grid.time(k);
    const double t1 = grid.time(k + 1);
    const std::size_t ki = static_cast<std::size_t>(k);
    auto rhs = [&](double t, const Vec6& pv) {
      const double th = clamp01((t - t0) / (t1 - t0));
      const PairState x = lerp(states.nodes[ki], states.nodes[ki + 1], th);
      const ControlPair c = lerp(u.nodes[ki], u.nodes[ki + 1], th);
      return adjoint_rhs(x, costate_from_array(pv), c, w);
    };
    try {
      p = rk4_step(rhs, p, t1, t0 - t1);
    } catch (const SeparationTooSmall& e) {
      throw SeparationTooSmall(e.separation_sq(), k);
    }
    out.nodes[ki] = costate_from_array(p);
  }
  return out;
}

ExtremalTrajectory integrate_extremal(const ExtendedState& start, const TimeGrid& grid,
                                      const Weights& w) {
  {
    const double d2 = separation_sq(start.state);
    if (!(d2 >= kSeparationGuardSq)) throw SeparationTooSmall(d2, 0);
  }
  ExtremalTrajectory out{{grid, {}}, {grid, {}}};
  out.states.nodes.reserve(static_cast<std::size_t>(grid.nodes()));
  out.costates.nodes.reserve(static_cast<std::size_t>(grid.nodes()));
  out.states.nodes.push_back(start.state);
  out.costates.nodes.push_back(start.costate);
  Vec12 y = to_array(start);
  auto rhs = [&](double, const Vec12& v) { return closed_loop_rhs(extended_from_array(v), w); };
  for (int k = 0; k < grid.steps(); ++k) {
    try {
      y = rk4_step(rhs, y, grid.time(k), grid.dt(k));
    } catch (const SeparationTooSmall& e) {
      throw SeparationTooSmall(e.separation_sq(), k);
    }
    const ExtendedState e = extended_from_array(y);
    const double d2 = separation_sq(e.state);
    if (!(d2 >= kSeparationGuardSq)) throw SeparationTooSmall(d2, k + 1);
    out.states.nodes.push_back(e.state);
    out.costates.nodes.push_back(e.costate);
  }
  return out;
}

ControlTrajectory induced_controls(const ExtremalTrajectory& ext, const Weights& w) {
  require_grid(ext.states.grid, ext.costates.grid, ext.costates.nodes.size());
  ControlTrajectory out{ext.states.grid, {}};
  out.nodes.reserve(ext.states.nodes.size());
  for (std::size_t i = 0; i < ext.states.nodes.size(); ++i)
    out.nodes.push_back(optimal_control(ext.states.nodes[i], ext.costates.nodes[i], w));
  return out;
}

double total_cost(const StateTrajectory& states, const ControlTrajectory& u, const Weights& w) {
  require_grid(states.grid, u.grid, u.nodes.size());
  require_grid(states.grid, states.grid, states.nodes.size());
  const TimeGrid& g = states.grid;
  double acc = 0.0;
  double prev = running_cost(states.nodes[0], u.nodes[0], w);
  for (int k = 0; k < g.steps(); ++k) {
    const std::size_t ki = static_cast<std::size_t>(k);
    const double next = running_cost(states.nodes[ki + 1], u.nodes[ki + 1], w);
    acc += 0.5 * g.dt(k) * (prev + next);
    prev = next;
  }
  return acc;
}

double min_separation(const StateTrajectory& states) {
  double best = std::numeric_limits<double>::infinity();
  for (const PairState& s : states.nodes) best = std::min(best, std::sqrt(separation_sq(s)));
  return best;
}

double hamiltonian_drift(const StateTrajectory& states, const CostateTrajectory& costates,
                         const ControlTrajectory& u, const Weights& w) {
  require_grid(states.grid, costates.grid, costates.nodes.size());
  require_grid(states.grid, u.grid, u.nodes.size());
  const double h0 = hamiltonian(states.nodes[0], costates.nodes[0], u.nodes[0], w);
  double drift = 0.0;
  for (std::size_t i = 1; i < states.nodes.size(); ++i) {
    const double hi = hamiltonian(states.nodes[i], costates.nodes[i], u.nodes[i], w);
    drift = std::max(drift, std::abs(hi - h0));
  }
  return drift / (1.0 + std::abs(h0));
}

}  // namespace dubinspair
