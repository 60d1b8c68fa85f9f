#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "dubinspair/errors.hpp"

namespace dubinspair {

/// Squared-distance singularity guard for the repulsion term. Evaluating the
/// running cost or adjoint field below this separation is an error, never a
/// clamped value.
inline constexpr double kSeparationGuardSq = 1e-9;

/// Planar unicycle state. pos1 advances with sin(heading), pos2 with
/// cos(heading). Headings are unwrapped reals; nothing ever reduces them
/// mod 2*pi.
struct VehicleState {
  double pos1 = 0.0;
  double pos2 = 0.0;
  double heading = 0.0;

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// The coupled pair: vehicle a and vehicle b.
struct PairState {
  VehicleState a;
  VehicleState b;

  friend bool operator==(const PairState&, const PairState&) = default;
};

/// Speed and turn-rate inputs for both vehicles. Controls are unconstrained;
/// negative speeds mean reverse motion.
struct ControlPair {
  double u1 = 0.0;  // vehicle-a speed
  double u2 = 0.0;  // vehicle-a turn rate
  double v1 = 0.0;  // vehicle-b speed
  double v2 = 0.0;  // vehicle-b turn rate

  friend bool operator==(const ControlPair&, const ControlPair&) = default;
};

/// Cost weights: control effort (delta), per-vehicle attraction to the origin
/// (beta for a, alpha for b) and mutual repulsion (rho). p0 is the fixed
/// normal-extremal multiplier; it is not configurable.
struct Weights {
  double delta = 1.0;
  double beta = 0.0;
  double alpha = 0.0;
  double rho = 0.0;

  static constexpr double p0 = -1.0;

  friend bool operator==(const Weights&, const Weights&) = default;
};

struct BoundaryConditions {
  PairState initial;
  PairState final;
  double horizon = 1.0;

  friend bool operator==(const BoundaryConditions&, const BoundaryConditions&) = default;
};

using Vec6 = std::array<double, 6>;
using Vec12 = std::array<double, 12>;

inline Vec6 to_array(const PairState& s) {
  return {s.a.pos1, s.a.pos2, s.a.heading, s.b.pos1, s.b.pos2, s.b.heading};
}

inline PairState pair_state_from_array(const Vec6& x) {
  return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}};
}

inline double separation_sq(const PairState& s) {
  const double d1 = s.a.pos1 - s.b.pos1;
  const double d2 = s.a.pos2 - s.b.pos2;
  return d1 * d1 + d2 * d2;
}

/// Time derivative of the pair state, in field order
/// (a.pos1, a.pos2, a.heading, b.pos1, b.pos2, b.heading).
inline Vec6 dynamics_rhs(const PairState& s, const ControlPair& c) {
  const double sa = std::sin(s.a.heading);
  const double ca = std::cos(s.a.heading);
  const double sb = std::sin(s.b.heading);
  const double cb = std::cos(s.b.heading);
  return {c.u1 * sa, c.u1 * ca, c.u2, c.v1 * sb, c.v1 * cb, c.v2};
}

/// Running-cost integrand
///   (1/2) [ delta |controls|^2 + beta |pos_a|^2 + alpha |pos_b|^2 + rho/d^2 ].
/// Per-vehicle subtotals are combined with single commutative adds; the
/// vehicle swap (a<->b, u<->v, beta<->alpha) is bit-exact.
inline double running_cost(const PairState& s, const ControlPair& c, const Weights& w) {
  const double d2 = separation_sq(s);
  if (!(d2 >= kSeparationGuardSq)) throw SeparationTooSmall(d2);
  const double effort_a = w.delta * (c.u1 * c.u1 + c.u2 * c.u2);
  const double effort_b = w.delta * (c.v1 * c.v1 + c.v2 * c.v2);
  const double pull_a = w.beta * (s.a.pos1 * s.a.pos1 + s.a.pos2 * s.a.pos2);
  const double pull_b = w.alpha * (s.b.pos1 * s.b.pos1 + s.b.pos2 * s.b.pos2);
  return 0.5 * ((effort_a + effort_b) + (pull_a + pull_b) + w.rho / d2);
}

struct Violation {
  std::string field;
  std::string message;

  std::string str() const { return field + ": " + message; }
};

/// Checks weight and boundary-condition invariants. Returns all violations,
/// not only the first; an empty list means the scenario is admissible.
std::vector<Violation> validate_scenario(const BoundaryConditions& bc, const Weights& w);

}  // namespace dubinspair
