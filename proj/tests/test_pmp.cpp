#include <array>
#include <cmath>
#include <random>

#include <doctest.h>

#include "dubinspair/pmp.hpp"

using namespace dubinspair;

namespace {

struct Sample {
  PairState s;
  Costate p;
  ControlPair c;
  Weights w;
};

/// Random evaluation points with separation kept well away from the guard.
Sample draw(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-3.14, 3.14);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::uniform_real_distribution<double> wpos(0.5, 2.0);
  std::uniform_real_distribution<double> wnn(0.0, 1.0);
  Sample smp;
  do {
    smp.s = {{pos(rng), pos(rng), ang(rng)}, {pos(rng), pos(rng), ang(rng)}};
  } while (separation_sq(smp.s) < 0.1);
  smp.p = {val(rng), val(rng), val(rng), val(rng), val(rng), val(rng)};
  smp.c = {val(rng), val(rng), val(rng), val(rng)};
  smp.w = {wpos(rng), wnn(rng), wnn(rng), 2.0 * wnn(rng)};
  return smp;
}

double fd_state_partial(const Sample& smp, int i) {
  Vec6 x = to_array(smp.s);
  const double h = 1e-6 * (1.0 + std::abs(x[i]));
  x[i] += h;
  const double hp = hamiltonian(pair_state_from_array(x), smp.p, smp.c, smp.w);
  x[i] -= 2.0 * h;
  const double hm = hamiltonian(pair_state_from_array(x), smp.p, smp.c, smp.w);
  return (hp - hm) / (2.0 * h);
}

double fd_control_partial(const Sample& smp, int i) {
  auto at = [&](double bump) {
    ControlPair c = smp.c;
    (i == 0 ? c.u1 : i == 1 ? c.u2 : i == 2 ? c.v1 : c.v2) += bump;
    return hamiltonian(smp.s, smp.p, c, smp.w);
  };
  const double h = 1e-6;
  return (at(h) - at(-h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("adjoint field is -dH/dstate (finite-difference oracle)") {
  std::mt19937 rng(20260814);
  for (int trial = 0; trial < 200; ++trial) {
    const Sample smp = draw(rng);
    const Vec6 pdot = adjoint_rhs(smp.s, smp.p, smp.c, smp.w);
    for (int i = 0; i < 6; ++i) {
      const double fd = -fd_state_partial(smp, i);
      CHECK(pdot[i] == doctest::Approx(fd).epsilon(5e-6).scale(1.0));
    }
  }
}

TEST_CASE("stationarity residual is dH/dcontrols (finite-difference oracle)") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Sample smp = draw(rng);
    const std::array<double, 4> r = stationarity_residual(smp.s, smp.p, smp.c, smp.w);
    for (int i = 0; i < 4; ++i)
      CHECK(r[i] == doctest::Approx(fd_control_partial(smp, i)).epsilon(5e-6).scale(1.0));
  }
}

TEST_CASE("optimal control zeroes the stationarity residual") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Sample smp = draw(rng);
    const ControlPair star = optimal_control(smp.s, smp.p, smp.w);
    const std::array<double, 4> r = stationarity_residual(smp.s, smp.p, star, smp.w);
    for (double ri : r) CHECK(std::abs(ri) < 1e-12);
  }
}

TEST_CASE("optimal control maximizes the Hamiltonian") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> bump(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Sample smp = draw(rng);
    const ControlPair star = optimal_control(smp.s, smp.p, smp.w);
    const double hstar = hamiltonian(smp.s, smp.p, star, smp.w);
    const ControlPair other{star.u1 + bump(rng), star.u2 + bump(rng), star.v1 + bump(rng),
                            star.v2 + bump(rng)};
    CHECK(hamiltonian(smp.s, smp.p, other, smp.w) <= hstar + 1e-12 * (1.0 + std::abs(hstar)));
  }
}

TEST_CASE("adjoint field is bit-exact under the vehicle swap") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    const Sample smp = draw(rng);
    const Vec6 pdot = adjoint_rhs(smp.s, smp.p, smp.c, smp.w);
    const PairState ss{smp.s.b, smp.s.a};
    const Costate ps{smp.p.p4, smp.p.p5, smp.p.p6, smp.p.p1, smp.p.p2, smp.p.p3};
    const ControlPair cs{smp.c.v1, smp.c.v2, smp.c.u1, smp.c.u2};
    const Weights ws{smp.w.delta, smp.w.alpha, smp.w.beta, smp.w.rho};
    const Vec6 qdot = adjoint_rhs(ss, ps, cs, ws);
    for (int i = 0; i < 3; ++i) {
      CHECK(pdot[i] == qdot[i + 3]);
      CHECK(pdot[i + 3] == qdot[i]);
    }
  }
}

TEST_CASE("hamiltonian is bit-exact under the vehicle swap") {
  std::mt19937 rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    const Sample smp = draw(rng);
    const PairState ss{smp.s.b, smp.s.a};
    const Costate ps{smp.p.p4, smp.p.p5, smp.p.p6, smp.p.p1, smp.p.p2, smp.p.p3};
    const ControlPair cs{smp.c.v1, smp.c.v2, smp.c.u1, smp.c.u2};
    const Weights ws{smp.w.delta, smp.w.alpha, smp.w.beta, smp.w.rho};
    CHECK(hamiltonian(smp.s, smp.p, smp.c, smp.w) == hamiltonian(ss, ps, cs, ws));
  }
}

TEST_CASE("adjoint field refuses separations below the guard") {
  const PairState s{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.5}};
  CHECK_THROWS_AS(adjoint_rhs(s, {}, {}, Weights{1.0, 0.0, 0.0, 1.0}), SeparationTooSmall);
}
