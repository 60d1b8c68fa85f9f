#include "dubinspair/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace dubinspair {

namespace {

constexpr int kMaxBacktracks = 60;

Vec6 terminal_residual6(const PairState& end, const PairState& target) {
  return {end.a.pos1 - target.a.pos1,    end.a.pos2 - target.a.pos2,
          end.a.heading - target.a.heading, end.b.pos1 - target.b.pos1,
          end.b.pos2 - target.b.pos2,    end.b.heading - target.b.heading};
}

/// All reductions below combine per-vehicle subtotals with one commutative
/// max/add, which keeps the vehicle swap bit-exact through the descent loop
/// (the matching-system polish afterwards is only floor-exact; its row sums
/// and elimination order permute under the swap).
double inf_norm6(const Vec6& v) {
  const double na = std::max(std::max(std::abs(v[0]), std::abs(v[1])), std::abs(v[2]));
  const double nb = std::max(std::max(std::abs(v[3]), std::abs(v[4])), std::abs(v[5]));
  return std::max(na, nb);
}

double inf_norm4(const std::array<double, 4>& r) {
  const double na = std::max(std::abs(r[0]), std::abs(r[1]));
  const double nb = std::max(std::abs(r[2]), std::abs(r[3]));
  return std::max(na, nb);
}

double l2_norm6(const Vec6& v) {
  const double sa = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double sb = v[3] * v[3] + v[4] * v[4] + v[5] * v[5];
  return std::sqrt(sa + sb);
}

/// Trapezoid hat weight of node k: the discrete pairing between nodal control
/// perturbations and the continuous gradient density.
double hat_weight(const TimeGrid& g, int k) {
  if (k == 0) return 0.5 * g.dt(0);
  if (k == g.steps()) return 0.5 * g.dt(k - 1);
  return 0.5 * (g.dt(k - 1) + g.dt(k));
}

/// Terminal costate of the penalized problem, p(T) = -w_T (state(T) - target).
/// Sign locked against the finite-difference cost gradient: with p = -lambda
/// (classical adjoint), lambda(T) = dPhi/dx(T) = w_T (state(T) - target).
Costate penalty_costate(const Vec6& res, double weight) {
  return {-weight * res[0], -weight * res[1], -weight * res[2],
          -weight * res[3], -weight * res[4], -weight * res[5]};
}

double penalty_term(const Vec6& res, double weight) {
  const double sa = res[0] * res[0] + res[1] * res[1] + res[2] * res[2];
  const double sb = res[3] * res[3] + res[4] * res[4] + res[5] * res[5];
  return 0.5 * weight * (sa + sb);
}

void require_valid(const BoundaryConditions& bc, const Weights& w, const SolveOptions& o) {
  std::vector<Violation> v = validate_scenario(bc, w);
  for (Violation& x : validate_options(o)) v.push_back(std::move(x));
  if (!v.empty()) {
    std::vector<std::string> msgs;
    msgs.reserve(v.size());
    for (const Violation& x : v) msgs.push_back(x.str());
    throw ScenarioInvalid(std::move(msgs));
  }
}

double& control_component(ControlPair& c, int i) {
  switch (i) {
    case 0: return c.u1;
    case 1: return c.u2;
    case 2: return c.v1;
    default: return c.v2;
  }
}

/// Dense Gaussian elimination with partial pivoting, sized for the
/// multiple-shooting normal equations (a is row-major n x n).  Elimination
/// factors that are exactly zero are skipped, so block-decoupled systems
/// (interaction weight zero) never mix arithmetic across the blocks.
std::optional<std::vector<double>> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    double mag = std::abs(a[c * n + c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double cand = std::abs(a[r * n + c]);
      if (cand > mag) {
        mag = cand;
        pivot = r;
      }
    }
    if (!(mag > 0.0)) return std::nullopt;
    if (pivot != c) {
      for (std::size_t k = c; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      std::swap(b[c], b[pivot]);
    }
    const double inv = 1.0 / a[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] * inv;
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

/// Multiple-shooting polish of the final descent iterate.  The iterate's
/// forward states and sweep costates seed state/costate unknowns at interior
/// junctions; Levenberg-Marquardt then drives the segment matching conditions
/// together with the exact terminal condition state(T) = target down to the
/// rounding floor.  Splitting the horizon keeps every Jacobian block
/// O(exp(L T / m)), so the seeds only need the pointwise accuracy the descent
/// iterate actually has.  A single-shooting start from the sweep costate
/// would instead see its error amplified by O(exp(L T)) across the whole
/// horizon and land outside every Newton basin.  Consumes iteration budget
/// through `iter`; returns the assembled extremal on the master grid, or
/// nullopt when the matching system cannot be driven to the floor (the
/// caller then keeps the plain iterate).
std::optional<ExtremalTrajectory> polish_extremal(const BoundaryConditions& bc, const Weights& w,
                                                  const TimeGrid& grid, const StateTrajectory& xs,
                                                  const CostateTrajectory& ps, int& iter,
                                                  int max_iterations) {
  const int steps = grid.steps();
  // segments need at least two RK4 steps each; 20 keeps per-segment growth mild
  const int m = std::max(1, std::min(20, steps / 2));
  std::vector<int> kj(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j)
    kj[static_cast<std::size_t>(j)] = static_cast<int>(static_cast<long>(j) * steps / m);
  const int n = 6 + 12 * (m - 1);

  const auto junction_x = [&](const std::vector<double>& y, int j) -> PairState {
    if (j == 0) return bc.initial;
    const int base = 6 + 12 * (j - 1);
    return {{y[base + 0], y[base + 1], y[base + 2]}, {y[base + 3], y[base + 4], y[base + 5]}};
  };
  const auto junction_p = [&](const std::vector<double>& y, int j) -> Costate {
    const int base = j == 0 ? 0 : 6 + 12 * (j - 1) + 6;
    return costate_from_array(
        {y[base + 0], y[base + 1], y[base + 2], y[base + 3], y[base + 4], y[base + 5]});
  };
  const auto segment = [&](int j, const PairState& xj,
                           const Costate& pj) -> std::optional<ExtremalTrajectory> {
    const TimeGrid seg(grid.time(kj[j + 1]) - grid.time(kj[j]), kj[j + 1] - kj[j]);
    try {
      return integrate_extremal({xj, pj}, seg, w);
    } catch (const SeparationTooSmall&) {
      return std::nullopt;
    } catch (const NonFiniteStage&) {
      return std::nullopt;
    }
  };
  // rows: 12 matching equations per interior junction, then 6 terminal ones
  const auto residual = [&](const std::vector<double>& y) -> std::optional<std::vector<double>> {
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int j = 0; j < m; ++j) {
      const auto ext = segment(j, junction_x(y, j), junction_p(y, j));
      if (!ext) return std::nullopt;
      if (j + 1 < m) {
        const Vec6 end_x = to_array(ext->states.nodes.back());
        const Vec6 end_p = to_array(ext->costates.nodes.back());
        const int nxt = 6 + 12 * j;
        for (int i = 0; i < 6; ++i) {
          r[12 * j + i] = end_x[i] - y[nxt + i];
          r[12 * j + 6 + i] = end_p[i] - y[nxt + 6 + i];
        }
      } else {
        const Vec6 res = terminal_residual6(ext->states.nodes.back(), bc.final);
        for (int i = 0; i < 6; ++i) r[12 * j + i] = res[i];
      }
    }
    return r;
  };
  const auto l2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  // junction guesses straight off the iterate
  std::vector<double> y(static_cast<std::size_t>(n));
  const Vec6 p0 = to_array(ps.nodes.front());
  for (int i = 0; i < 6; ++i) y[i] = p0[i];
  for (int j = 1; j < m; ++j) {
    const Vec6 xj = to_array(xs.nodes[static_cast<std::size_t>(kj[j])]);
    const Vec6 pj = to_array(ps.nodes[static_cast<std::size_t>(kj[j])]);
    const int base = 6 + 12 * (j - 1);
    for (int i = 0; i < 6; ++i) {
      y[base + i] = xj[i];
      y[base + 6 + i] = pj[i];
    }
  }

  std::optional<std::vector<double>> res = residual(y);
  if (!res) return std::nullopt;
  double norm = l2(*res);
  double lm = 1e-3;
  const int budget = std::min(60, max_iterations - iter);
  for (int it = 0; it < budget && norm > 1e-11; ++it) {
    ++iter;
    // dense Jacobian: finite differences per junction column touch only that
    // junction's segment; the coupling to the next junction is exactly -I
    std::vector<double> jac(static_cast<std::size_t>(n) * n, 0.0);
    bool ok = true;
    for (int j = 0; j < m && ok; ++j) {
      const int col0 = j == 0 ? 0 : 6 + 12 * (j - 1);
      const int ncols = j == 0 ? 6 : 12;
      const int row0 = 12 * j;
      for (int c = 0; c < ncols && ok; ++c) {
        std::vector<double> yp = y;
        const double h = 1e-6 * (1.0 + std::abs(y[col0 + c]));
        yp[col0 + c] += h;
        const auto ext = segment(j, junction_x(yp, j), junction_p(yp, j));
        if (!ext) {
          ok = false;
          break;
        }
        if (j + 1 < m) {
          const Vec6 end_x = to_array(ext->states.nodes.back());
          const Vec6 end_p = to_array(ext->costates.nodes.back());
          const int nxt = 6 + 12 * j;
          for (int i = 0; i < 6; ++i) {
            const double rx = end_x[i] - y[nxt + i];
            const double rp = end_p[i] - y[nxt + 6 + i];
            jac[static_cast<std::size_t>(row0 + i) * n + col0 + c] =
                (rx - (*res)[row0 + i]) / h;
            jac[static_cast<std::size_t>(row0 + 6 + i) * n + col0 + c] =
                (rp - (*res)[row0 + 6 + i]) / h;
          }
        } else {
          const Vec6 rt = terminal_residual6(ext->states.nodes.back(), bc.final);
          for (int i = 0; i < 6; ++i)
            jac[static_cast<std::size_t>(row0 + i) * n + col0 + c] =
                (rt[i] - (*res)[row0 + i]) / h;
        }
      }
      if (j + 1 < m) {
        const int nxt = 6 + 12 * j;
        for (int i = 0; i < 12; ++i)
          jac[static_cast<std::size_t>(row0 + i) * n + nxt + i] = -1.0;
      }
    }
    if (!ok) break;

    // normal equations (J^T J + lm diag(J^T J)) d = -J^T res
    std::vector<double> jtj(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> jtr(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a) {
      for (int r = 0; r < n; ++r) {
        const double ja = jac[static_cast<std::size_t>(r) * n + a];
        if (ja == 0.0) continue;
        for (int b = 0; b < n; ++b)
          jtj[static_cast<std::size_t>(a) * n + b] += ja * jac[static_cast<std::size_t>(r) * n + b];
        jtr[a] += ja * (*res)[r];
      }
    }
    double diag_floor = 0.0;
    for (int a = 0; a < n; ++a)
      diag_floor = std::max(diag_floor, jtj[static_cast<std::size_t>(a) * n + a]);
    diag_floor = std::max(diag_floor * 1e-12, 1e-30);

    bool accepted = false;
    for (int tries = 0; tries < 24 && !accepted; ++tries) {
      std::vector<double> damped = jtj;
      for (int a = 0; a < n; ++a)
        damped[static_cast<std::size_t>(a) * n + a] +=
            lm * std::max(jtj[static_cast<std::size_t>(a) * n + a], diag_floor);
      std::vector<double> rhs(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) rhs[a] = -jtr[a];
      if (const auto d = solve_dense(std::move(damped), std::move(rhs))) {
        std::vector<double> yt(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) yt[i] = y[i] + (*d)[i];
        if (auto rt = residual(yt)) {
          const double l2t = l2(*rt);
          if (l2t < norm) {
            y = std::move(yt);
            norm = l2t;
            res = std::move(rt);
            lm = std::max(lm / 3.0, 1e-10);
            accepted = true;
          }
        }
      }
      if (!accepted) lm *= 10.0;
    }
    if (!accepted) break;  // rounding floor or an infeasible wall: done
  }
  if (!(norm <= 1e-9)) return std::nullopt;

  // assemble the polished tuple on the master grid
  ExtremalTrajectory out{{grid, {}}, {grid, {}}};
  out.states.nodes.reserve(static_cast<std::size_t>(grid.nodes()));
  out.costates.nodes.reserve(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j < m; ++j) {
    const auto ext = segment(j, junction_x(y, j), junction_p(y, j));
    if (!ext) return std::nullopt;
    const std::size_t keep = ext->states.nodes.size() - (j + 1 < m ? 1 : 0);
    for (std::size_t k = 0; k < keep; ++k) {
      out.states.nodes.push_back(ext->states.nodes[k]);
      out.costates.nodes.push_back(ext->costates.nodes[k]);
    }
  }
  return out;
}

}  // namespace

std::vector<Violation> validate_options(const SolveOptions& o) {
  std::vector<Violation> v;
  auto bad = [&](const char* field, const char* msg) { v.push_back({field, msg}); };
  if (!(o.steps >= 2)) bad("solver.steps", "must be at least 2");
  if (!(o.max_iterations >= 1)) bad("solver.max_iterations", "must be at least 1");
  if (!(o.gradient_tolerance > 0.0)) bad("solver.gradient_tolerance", "must be positive");
  if (!(o.cost_tolerance > 0.0)) bad("solver.cost_tolerance", "must be positive");
  if (!(o.armijo_slope > 0.0 && o.armijo_slope < 1.0))
    bad("solver.armijo_slope", "must lie in (0,1)");
  if (!(o.backtrack_factor > 0.0 && o.backtrack_factor < 1.0))
    bad("solver.backtrack_factor", "must lie in (0,1)");
  if (!(o.initial_step > 0.0)) bad("solver.initial_step", "must be positive");
  if (!(o.penalty.initial > 0.0)) bad("solver.penalty.initial", "must be positive");
  if (!(o.penalty.growth > 1.0)) bad("solver.penalty.growth", "must exceed 1");
  if (!(o.penalty.max >= o.penalty.initial))
    bad("solver.penalty.max", "must be at least penalty.initial");
  if (!(o.residual_tolerance > 0.0)) bad("solver.residual_tolerance", "must be positive");
  return v;
}

double augmented_cost(const StateTrajectory& states, const ControlTrajectory& u,
                      const Weights& w, const TerminalPenalty& pen) {
  const double base = total_cost(states, u, w);
  const Vec6 res = terminal_residual6(states.nodes.back(), pen.target);
  return base + penalty_term(res, pen.weight);
}

ControlTrajectory initial_guess(const BoundaryConditions& bc, const TimeGrid& grid) {
  auto guess = [&](const VehicleState& from, const VehicleState& to) {
    const double dx = to.pos1 - from.pos1;
    const double dy = to.pos2 - from.pos2;
    return std::pair{std::sqrt(dx * dx + dy * dy) / bc.horizon,
                     (to.heading - from.heading) / bc.horizon};
  };
  const auto [sa, ta] = guess(bc.initial.a, bc.final.a);
  const auto [sb, tb] = guess(bc.initial.b, bc.final.b);
  return {grid,
          std::vector<ControlPair>(static_cast<std::size_t>(grid.nodes()), {sa, ta, sb, tb})};
}

std::vector<std::array<double, 4>> adjoint_cost_gradient(const ControlTrajectory& u,
                                                         const BoundaryConditions& bc,
                                                         const Weights& w,
                                                         const TerminalPenalty& pen) {
  const TimeGrid& grid = u.grid;
  const StateTrajectory xs = integrate_forward(bc.initial, u, grid);
  const Vec6 res = terminal_residual6(xs.nodes.back(), pen.target);
  const CostateTrajectory ps =
      integrate_backward(penalty_costate(res, pen.weight), xs, u, grid, w);
  std::vector<std::array<double, 4>> out(u.nodes.size());
  for (int k = 0; k <= grid.steps(); ++k) {
    const std::size_t ki = static_cast<std::size_t>(k);
    const auto r = stationarity_residual(xs.nodes[ki], ps.nodes[ki], u.nodes[ki], w);
    const double wk = hat_weight(grid, k);
    out[ki] = {-wk * r[0], -wk * r[1], -wk * r[2], -wk * r[3]};
  }
  return out;
}

std::vector<std::array<double, 4>> fd_cost_gradient(const ControlTrajectory& u,
                                                    const BoundaryConditions& bc, const Weights& w,
                                                    const TerminalPenalty& pen) {
  std::vector<std::array<double, 4>> out(u.nodes.size());
  ControlTrajectory probe = u;
  for (std::size_t k = 0; k < u.nodes.size(); ++k) {
    for (int i = 0; i < 4; ++i) {
      const double base = control_component(probe.nodes[k], i);
      const double step = 1e-6 * (1.0 + std::abs(base));
      control_component(probe.nodes[k], i) = base + step;
      const double jp = augmented_cost(integrate_forward(bc.initial, probe, u.grid), probe, w, pen);
      control_component(probe.nodes[k], i) = base - step;
      const double jm = augmented_cost(integrate_forward(bc.initial, probe, u.grid), probe, w, pen);
      control_component(probe.nodes[k], i) = base;
      out[k][i] = (jp - jm) / (2.0 * step);
    }
  }
  return out;
}

Solution fbsm_solve(const BoundaryConditions& bc, const Weights& w, const SolveOptions& opts) {
  require_valid(bc, w, opts);
  const TimeGrid grid(bc.horizon, opts.steps);
  TerminalPenalty pen{std::min(opts.penalty.initial, opts.penalty.max), bc.final};

  ControlTrajectory u = initial_guess(bc, grid);
  StateTrajectory xs = integrate_forward(bc.initial, u, grid);
  double cost = augmented_cost(xs, u, w, pen);
  std::vector<AcceptedStep> history{{pen.weight, cost}};

  const std::size_t n = u.nodes.size();
  std::vector<std::array<double, 4>> rs(n);
  std::vector<std::array<double, 4>> rs_prev(n);
  ControlTrajectory u_trial{grid, std::vector<ControlPair>(n)};
  int iter = 0;
  int stagnant = 0;
  bool converged = false;
  bool have_prev = false;  // a step was accepted at the current penalty weight
  double sigma_prev = 0.0;
  double slope_prev = 0.0;
  const auto at_cap = [&] { return pen.weight >= opts.penalty.max; };
  const auto grow = [&] {
    pen.weight = std::min(pen.weight * opts.penalty.growth, opts.penalty.max);
    cost = augmented_cost(xs, u, w, pen);
    history.push_back({pen.weight, cost});
    stagnant = 0;
    have_prev = false;
  };

  while (iter < opts.max_iterations) {
    const Vec6 res = terminal_residual6(xs.nodes.back(), pen.target);
    const CostateTrajectory ps =
        integrate_backward(penalty_costate(res, pen.weight), xs, u, grid, w);
    double gnorm = 0.0;
    double slope_a = 0.0;
    double slope_b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      rs[k] = stationarity_residual(xs.nodes[k], ps.nodes[k], u.nodes[k], w);
      gnorm = std::max(gnorm, inf_norm4(rs[k]));
      const double wk = hat_weight(grid, static_cast<int>(k));
      slope_a += wk * (rs[k][0] * rs[k][0] + rs[k][1] * rs[k][1]);
      slope_b += wk * (rs[k][2] * rs[k][2] + rs[k][3] * rs[k][3]);
    }
    const double slope = slope_a + slope_b;

    if (gnorm <= opts.gradient_tolerance) {
      if (at_cap()) {
        converged = true;
        break;
      }
      grow();
      continue;
    }

    // Inexact continuation: intermediate weights are only solved to a
    // sqrt(cost_tolerance)-relative stagnation, since they just track the
    // penalty path.  The pinned cost_tolerance applies at the final weight,
    // where stagnation is convergence.
    const double stag_rel =
        at_cap() ? opts.cost_tolerance : std::sqrt(opts.cost_tolerance);

    // Ascent of H is descent of the augmented cost: u <- u + sigma r.
    // Initial step: spectral (Barzilai-Borwein) in the trapezoid metric once
    // a step at this weight has been accepted, gradient-scaled otherwise.
    // All sums keep the per-vehicle-subtotal discipline.
    double sigma = opts.initial_step / (1.0 + gnorm);
    if (have_prev) {
      double cross_a = 0.0;
      double cross_b = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double wk = hat_weight(grid, static_cast<int>(k));
        cross_a += wk * (rs_prev[k][0] * rs[k][0] + rs_prev[k][1] * rs[k][1]);
        cross_b += wk * (rs_prev[k][2] * rs[k][2] + rs_prev[k][3] * rs[k][3]);
      }
      const double denom = slope_prev - (cross_a + cross_b);
      if (denom > 0.0) {
        const double bb = sigma_prev * (slope_prev / denom);
        if (std::isfinite(bb)) sigma = std::min(std::max(bb, 1e-12), 1e6);
      }
    }
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks && !accepted; ++bt) {
      for (std::size_t k = 0; k < n; ++k) {
        const ControlPair& c = u.nodes[k];
        u_trial.nodes[k] = {c.u1 + sigma * rs[k][0], c.u2 + sigma * rs[k][1],
                            c.v1 + sigma * rs[k][2], c.v2 + sigma * rs[k][3]};
      }
      try {
        StateTrajectory xs_trial = integrate_forward(bc.initial, u_trial, grid);
        const double trial = augmented_cost(xs_trial, u_trial, w, pen);
        if (trial <= cost - opts.armijo_slope * sigma * slope) {
          const double drop = cost - trial;
          std::swap(u.nodes, u_trial.nodes);
          xs = std::move(xs_trial);
          cost = trial;
          history.push_back({pen.weight, cost});
          // relative stagnation test; scale-free so decoupled subproblems
          // make identical growth decisions inside a pair solve
          stagnant = (drop <= stag_rel * std::abs(cost)) ? stagnant + 1 : 0;
          rs_prev.swap(rs);
          sigma_prev = sigma;
          slope_prev = slope;
          have_prev = true;
          accepted = true;
        }
      } catch (const SeparationTooSmall&) {
        // trial collided: infinite cost, reject
      } catch (const NonFiniteStage&) {
        // overflow along an overlong step: likewise reject
      }
      if (!accepted) sigma *= opts.backtrack_factor;
    }
    ++iter;

    if (!accepted) {
      if (at_cap()) break;  // stalled at the final weight
      grow();
      continue;
    }
    if (stagnant >= 2) {
      if (at_cap()) {
        // Weight schedule exhausted and the cost has settled to within
        // cost_tolerance: the penalized problem is done.
        converged = true;
        break;
      }
      grow();
    }
  }

  Solution sol{bc, w, std::move(xs), {}, std::move(u), {}, std::move(history)};
  const Vec6 res = terminal_residual6(sol.states.nodes.back(), pen.target);
  sol.costates = integrate_backward(penalty_costate(res, pen.weight), sol.states, sol.controls,
                                    grid, w);

  if (std::optional<ExtremalTrajectory> ext =
          polish_extremal(bc, w, grid, sol.states, sol.costates, iter, opts.max_iterations)) {
    sol.states = std::move(ext->states);
    sol.costates = std::move(ext->costates);
    sol.controls = induced_controls({sol.states, sol.costates}, w);
    converged = true;
  } else {
    // The iterate could not be sharpened into an extremal; fall back to the
    // pointwise Hamiltonian maximizers of the final sweep so the returned
    // tuple still satisfies the stationarity rows exactly.
    for (std::size_t k = 0; k < n; ++k)
      sol.controls.nodes[k] = optimal_control(sol.states.nodes[k], sol.costates.nodes[k], w);
  }
  sol.report.converged = converged;
  sol.report.iterations = iter;
  sol.report.method = "fbsm";
  sol.report = check_suite(sol);
  return sol;
}

Solution shooting_solve(const BoundaryConditions& bc, const Weights& w, const SolveOptions& opts,
                        const std::optional<Costate>& warm_start) {
  require_valid(bc, w, opts);
  const TimeGrid grid(bc.horizon, opts.steps);

  struct Shot {
    Vec6 res;
    double l2;
  };
  const auto shoot = [&](const Vec6& q) -> std::optional<Shot> {
    try {
      const ExtremalTrajectory ext =
          integrate_extremal({bc.initial, costate_from_array(q)}, grid, w);
      const Vec6 res = terminal_residual6(ext.states.nodes.back(), bc.final);
      return Shot{res, l2_norm6(res)};
    } catch (const SeparationTooSmall&) {
      return std::nullopt;
    } catch (const NonFiniteStage&) {
      return std::nullopt;
    }
  };

  std::vector<Vec6> starts;
  if (warm_start) starts.push_back(to_array(*warm_start));
  starts.push_back(Vec6{});
  for (int j = 0; j <= 2; ++j) {
    const double v = std::pow(10.0, -2 + j);
    starts.push_back({v, v, v, v, v, v});
    starts.push_back({-v, -v, -v, -v, -v, -v});
  }

  int iter = 0;
  bool converged = false;
  bool any_feasible = false;
  Vec6 best_q{};
  double best_l2 = std::numeric_limits<double>::infinity();
  const auto remember = [&](const Vec6& q, const Shot& s) {
    any_feasible = true;
    if (s.l2 < best_l2) {
      best_l2 = s.l2;
      best_q = q;
    }
  };

  for (const Vec6& q0 : starts) {
    if (converged || iter >= opts.max_iterations) break;
    std::optional<Shot> cur = shoot(q0);
    if (!cur) continue;
    Vec6 q = q0;
    remember(q, *cur);

    // Levenberg-Marquardt on the shot residual.  Damping adapts per start;
    // each start also gets its own iteration allowance so one bad basin
    // cannot starve the rest of the list.
    double lm = 1e-3;
    const int start_budget = std::min(opts.max_iterations, 300);
    for (int local = 0; local < start_budget && iter < opts.max_iterations; ++local) {
      if (inf_norm6(cur->res) <= opts.residual_tolerance) {
        best_q = q;  // the converged root wins regardless of earlier iterates
        converged = true;
        break;
      }
      ++iter;

      std::array<Vec6, 6> jac{};  // jac[row][col] = dR_row / dq_col
      bool jac_ok = true;
      for (int c = 0; c < 6 && jac_ok; ++c) {
        Vec6 qp = q;
        const double hstep = 1e-6 * (1.0 + std::abs(q[c]));
        qp[c] += hstep;
        const std::optional<Shot> rp = shoot(qp);
        if (!rp) {
          jac_ok = false;
          break;
        }
        for (int r = 0; r < 6; ++r) jac[r][c] = (rp->res[r] - cur->res[r]) / hstep;
      }
      if (!jac_ok) break;  // cannot linearize here, try the next start

      // normal equations (J^T J + lm diag(J^T J)) d = -J^T r
      std::array<Vec6, 6> jtj{};
      Vec6 jtr{};
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b)
          for (int r = 0; r < 6; ++r) jtj[a][b] += jac[r][a] * jac[r][b];
        for (int r = 0; r < 6; ++r) jtr[a] += jac[r][a] * cur->res[r];
      }
      double diag_floor = 0.0;
      for (int a = 0; a < 6; ++a) diag_floor = std::max(diag_floor, jtj[a][a]);
      diag_floor = std::max(diag_floor * 1e-12, 1e-30);

      bool accepted = false;
      for (int tries = 0; tries < 24 && !accepted; ++tries) {
        std::array<Vec6, 6> damped = jtj;
        for (int a = 0; a < 6; ++a)
          damped[a][a] += lm * std::max(jtj[a][a], diag_floor);
        Vec6 rhs;
        for (int a = 0; a < 6; ++a) rhs[a] = -jtr[a];
        const std::optional<Vec6> d = detail::solve_linear6(damped, rhs);
        if (d) {
          Vec6 qt;
          for (int i = 0; i < 6; ++i) qt[i] = q[i] + (*d)[i];
          const std::optional<Shot> nxt = shoot(qt);
          if (nxt && nxt->l2 < cur->l2) {
            q = qt;
            cur = *nxt;
            remember(q, *cur);
            lm = std::max(lm / 3.0, 1e-10);
            accepted = true;
            break;
          }
        }
        lm *= 10.0;
        if (lm > 1e14) break;
      }
      if (!accepted) break;  // damping exhausted, try the next start
    }
    if (!converged && inf_norm6(cur->res) <= opts.residual_tolerance) {
      best_q = q;  // budget ended on the accepting step
      converged = true;
    }
  }

  if (!any_feasible) {
    // every start collided; redo the first one so the genuine error propagates
    integrate_extremal({bc.initial, costate_from_array(starts.front())}, grid, w);
  }

  const ExtremalTrajectory ext =
      integrate_extremal({bc.initial, costate_from_array(best_q)}, grid, w);
  ControlTrajectory uc = induced_controls(ext, w);
  Solution sol{bc, w, ext.states, ext.costates, std::move(uc), {}, {}};
  sol.report.converged = converged;
  sol.report.iterations = iter;
  sol.report.method = "shooting";
  sol.report = check_suite(sol);
  return sol;
}

SolveReport check_suite(const Solution& solution) {
  SolveReport r = solution.report;  // converged/iterations/method pass through
  r.final_cost = total_cost(solution.states, solution.controls, solution.weights);
  r.terminal_residual = terminal_residual6(solution.states.nodes.back(), solution.bc.final);
  double ms = 0.0;
  for (std::size_t k = 0; k < solution.states.nodes.size(); ++k)
    ms = std::max(ms, inf_norm4(stationarity_residual(solution.states.nodes[k],
                                                      solution.costates.nodes[k],
                                                      solution.controls.nodes[k],
                                                      solution.weights)));
  r.max_stationarity = ms;
  r.hamiltonian_drift =
      hamiltonian_drift(solution.states, solution.costates, solution.controls, solution.weights);
  r.min_separation = min_separation(solution.states);
  return r;
}

namespace detail {

std::optional<Vec6> solve_linear6(std::array<Vec6, 6> a, Vec6 b) {
  double scale = 0.0;
  for (const Vec6& row : a)
    for (double x : row) scale = std::max(scale, std::abs(x));
  const double tiny = scale * 1e-14;

  for (int col = 0; col < 6; ++col) {
    int piv = col;
    for (int r = col + 1; r < 6; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > tiny)) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 6; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 6; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  Vec6 x{};
  for (int row = 5; row >= 0; --row) {
    double s = b[row];
    for (int c = row + 1; c < 6; ++c) s -= a[row][c] * x[c];
    x[row] = s / a[row][row];
  }
  return x;
}

}  // namespace detail

}  // namespace dubinspair
