#include <cmath>

#include <doctest.h>

#include "dubinspair/model.hpp"

using namespace dubinspair;

namespace {

const Weights kPaperWeights{1.0, 0.05, 0.05, 1.0};

ControlPair swapped(const ControlPair& c) { return {c.v1, c.v2, c.u1, c.u2}; }

PairState swapped(const PairState& s) { return {s.b, s.a}; }

Weights swapped(const Weights& w) { return {w.delta, w.alpha, w.beta, w.rho}; }

}  // namespace

TEST_CASE("dynamics at axis-aligned headings") {
  PairState s;
  s.a = {1.0, 2.0, 0.0};                 // heading 0: motion along pos2
  s.b = {0.0, 0.0, 1.5707963267948966};  // heading pi/2: motion along pos1
  const ControlPair c{2.0, 0.5, 3.0, -1.0};
  const Vec6 f = dynamics_rhs(s, c);
  CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(2.0));
  CHECK(f[2] == 0.5);
  CHECK(f[3] == doctest::Approx(3.0));
  CHECK(f[4] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f[5] == -1.0);
}

TEST_CASE("running cost assembles all four terms") {
  // d^2 = 25, |pos_a|^2 = 2, |pos_b|^2 = 17, |controls|^2 = 4
  const PairState s{{1.0, 1.0, 0.3}, {4.0, -1.0, 0.0}};
  const ControlPair c{1.0, 1.0, 1.0, 1.0};
  const Weights w{2.0, 0.4, 0.6, 5.0};
  const double expected = 0.5 * (2.0 * 4.0 + 0.4 * 2.0 + 0.6 * 17.0 + 5.0 / 13.0);
  CHECK(running_cost(s, c, w) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("running cost refuses separations below the guard") {
  const PairState s{{1.0, 1.0, 0.0}, {1.0, 1.0 + 1e-6, 0.0}};
  CHECK_THROWS_AS(running_cost(s, {}, kPaperWeights), SeparationTooSmall);
  const PairState coincident{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}};
  CHECK_THROWS_AS(running_cost(coincident, {}, kPaperWeights), SeparationTooSmall);
}

TEST_CASE("running cost is bit-exact under the vehicle swap") {
  const PairState s{{1.37, -0.21, 0.77}, {-2.05, 3.11, -1.3}};
  const ControlPair c{0.6, -1.1, 2.3, 0.05};
  const Weights w{1.7, 0.31, 0.09, 2.4};
  CHECK(running_cost(s, c, w) == running_cost(swapped(s), swapped(c), swapped(w)));
}

TEST_CASE("pair state array round trip") {
  const PairState s{{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}};
  CHECK(pair_state_from_array(to_array(s)) == s);
}

TEST_CASE("scenario validation flags every violation") {
  BoundaryConditions bc;
  bc.initial = {{0.0, 0.0, 0.0}, {5.0, 0.0, 0.0}};
  bc.final = {{1.0, 0.0, 0.0}, {6.0, 0.0, 0.0}};
  bc.horizon = 1.0;
  CHECK(validate_scenario(bc, kPaperWeights).empty());

  SUBCASE("non-positive weights") {
    const auto v = validate_scenario(bc, Weights{-1.0, 0.05, 0.05, 1.0});
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "weights.delta");
  }
  SUBCASE("negative repulsion") {
    CHECK(validate_scenario(bc, Weights{1.0, 0.0, 0.0, -2.0}).size() == 1);
  }
  SUBCASE("bad horizon") {
    bc.horizon = 0.0;
    CHECK(validate_scenario(bc, kPaperWeights).size() == 1);
  }
  SUBCASE("non-finite endpoint") {
    bc.final.a.pos1 = std::nan("");
    CHECK(!validate_scenario(bc, kPaperWeights).empty());
  }
  SUBCASE("coincident endpoints") {
    bc.initial.b = bc.initial.a;
    const auto v = validate_scenario(bc, kPaperWeights);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "initial");
  }
  SUBCASE("violations accumulate") {
    bc.horizon = -3.0;
    CHECK(validate_scenario(bc, Weights{0.0, 0.05, 0.05, 1.0}).size() == 2);
  }
}
