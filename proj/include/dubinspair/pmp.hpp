#pragma once

#include <array>
#include <cmath>

#include "dubinspair/model.hpp"

namespace dubinspair {

/// Adjoint variables, ordered like the state they pair with:
/// (p1,p2,p3) <-> vehicle a, (p4,p5,p6) <-> vehicle b.
struct Costate {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  double p5 = 0.0;
  double p6 = 0.0;

  friend bool operator==(const Costate&, const Costate&) = default;
};

inline Vec6 to_array(const Costate& p) {
  return {p.p1, p.p2, p.p3, p.p4, p.p5, p.p6};
}

inline Costate costate_from_array(const Vec6& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

/// State/costate pair carried by the extremal flow.
struct ExtendedState {
  PairState state;
  Costate costate;

  friend bool operator==(const ExtendedState&, const ExtendedState&) = default;
};

inline Vec12 to_array(const ExtendedState& e) {
  const Vec6 x = to_array(e.state);
  const Vec6 p = to_array(e.costate);
  return {x[0], x[1], x[2], x[3], x[4], x[5], p[0], p[1], p[2], p[3], p[4], p[5]};
}

inline ExtendedState extended_from_array(const Vec12& v) {
  return {pair_state_from_array({v[0], v[1], v[2], v[3], v[4], v[5]}),
          costate_from_array({v[6], v[7], v[8], v[9], v[10], v[11]})};
}

/// Control-Hamiltonian H = p . f + p0 L with the normal multiplier p0 = -1.
/// Per-vehicle flow terms are combined with one commutative add so the
/// vehicle swap is bit-exact.
inline double hamiltonian(const PairState& s, const Costate& p, const ControlPair& c,
                          const Weights& w) {
  const double sa = std::sin(s.a.heading);
  const double ca = std::cos(s.a.heading);
  const double sb = std::sin(s.b.heading);
  const double cb = std::cos(s.b.heading);
  const double flow_a = c.u1 * (p.p1 * sa + p.p2 * ca) + p.p3 * c.u2;
  const double flow_b = c.v1 * (p.p4 * sb + p.p5 * cb) + p.p6 * c.v2;
  return (flow_a + flow_b) + Weights::p0 * running_cost(s, c, w);
}

/// Pointwise maximizer of H over the (unbounded) controls. H is strictly
/// concave in the controls for delta > 0, so this is the unique stationary
/// point.
inline ControlPair optimal_control(const PairState& s, const Costate& p, const Weights& w) {
  const double sa = std::sin(s.a.heading);
  const double ca = std::cos(s.a.heading);
  const double sb = std::sin(s.b.heading);
  const double cb = std::cos(s.b.heading);
  return {(p.p1 * sa + p.p2 * ca) / w.delta, p.p3 / w.delta,
          (p.p4 * sb + p.p5 * cb) / w.delta, p.p6 / w.delta};
}

/// Gradient of H in the controls, dH/d(u1,u2,v1,v2). Vanishes exactly at
/// optimal_control; the forward-backward sweep uses it as the control-space
/// residual.
inline std::array<double, 4> stationarity_residual(const PairState& s, const Costate& p,
                                                   const ControlPair& c, const Weights& w) {
  const double sa = std::sin(s.a.heading);
  const double ca = std::cos(s.a.heading);
  const double sb = std::sin(s.b.heading);
  const double cb = std::cos(s.b.heading);
  return {(p.p1 * sa + p.p2 * ca) - w.delta * c.u1, p.p3 - w.delta * c.u2,
          (p.p4 * sb + p.p5 * cb) - w.delta * c.v1, p.p6 - w.delta * c.v2};
}

/// Costate dynamics pdot = -dH/dx. The repulsion gradient carries d^4 in the
/// denominator; the shared terms g1, g2 enter vehicle a with one sign and
/// vehicle b with the other, which keeps the swap bit-exact.
inline Vec6 adjoint_rhs(const PairState& s, const Costate& p, const ControlPair& c,
                        const Weights& w) {
  const double d2 = separation_sq(s);
  if (!(d2 >= kSeparationGuardSq)) throw SeparationTooSmall(d2);
  const double d4 = d2 * d2;
  const double g1 = w.rho * (s.a.pos1 - s.b.pos1) / d4;
  const double g2 = w.rho * (s.a.pos2 - s.b.pos2) / d4;
  const double sa = std::sin(s.a.heading);
  const double ca = std::cos(s.a.heading);
  const double sb = std::sin(s.b.heading);
  const double cb = std::cos(s.b.heading);
  return {w.beta * s.a.pos1 - g1,
          w.beta * s.a.pos2 - g2,
          -c.u1 * (p.p1 * ca - p.p2 * sa),
          w.alpha * s.b.pos1 + g1,
          w.alpha * s.b.pos2 + g2,
          -c.v1 * (p.p4 * cb - p.p5 * sb)};
}

/// Extremal field: dynamics and adjoint evaluated at the H-maximizing
/// control. Built by composition; there is no separate hand-written form.
inline Vec12 closed_loop_rhs(const ExtendedState& e, const Weights& w) {
  const ControlPair c = optimal_control(e.state, e.costate, w);
  const Vec6 xdot = dynamics_rhs(e.state, c);
  const Vec6 pdot = adjoint_rhs(e.state, e.costate, c, w);
  return {xdot[0], xdot[1], xdot[2], xdot[3], xdot[4], xdot[5],
          pdot[0], pdot[1], pdot[2], pdot[3], pdot[4], pdot[5]};
}

}  // namespace dubinspair
