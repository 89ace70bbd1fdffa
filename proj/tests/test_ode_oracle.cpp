#include <cmath>

#include "doctest.h"
#include "pontspec/efimov.hpp"
#include "pontspec/errors.hpp"
#include "pontspec/ode_oracle.hpp"
#include "pontspec/two_center.hpp"

using namespace pontspec;

TEST_CASE("square well ground state") {
  const LevelSet set = find_levels(RadialPotential::square_well(10.0, 1.0), 3);
  // Depth 10 on the unit ball holds one s-wave level (sqrt10 < 3pi/2).
  REQUIRE(set.energies.size() == 1);
  CHECK(std::abs(set.energies[0] / -4.6241940863297795489 - 1.0) < 1e-10);
  CHECK(set.labels[0] == 1);
  CHECK(set.nodes[0] == 0);
}

TEST_CASE("square well with levels by node count") {
  // Depth 80: roots of q cot q = -kappa, q^2 + kappa^2 = 80; three levels (5pi/2 < sqrt80).
  const LevelSet set = find_levels(RadialPotential::square_well(80.0, 1.0), 5);
  REQUIRE(set.energies.size() == 3);
  for (std::size_t i = 0; i < set.energies.size(); ++i) {
    CHECK(set.labels[i] == int(i) + 1);
    CHECK(set.nodes[i] == int(i));
    const double kappa = std::sqrt(-set.energies[i]);
    const double q = std::sqrt(80.0 - kappa * kappa);
    CHECK(std::abs(q / std::tan(q) + kappa) < 1e-9);
  }
}

TEST_CASE("well plus sub-critical inverse-square tail") {
  const RadialPotential pot = RadialPotential::piecewise([](double) { return -8.0; }, 1.0, 0.2);
  const LevelSet set = find_levels(pot, 2);
  REQUIRE(!set.energies.empty());
  CHECK(std::abs(set.energies[0] / -3.0483642212231729616 - 1.0) < 1e-10);
}

TEST_CASE("levels are stable under step refinement") {
  const RadialPotential pot = RadialPotential::piecewise([](double) { return -8.0; }, 1.0, 0.2);
  LevelSearchOptions coarse;
  coarse.linear_step = 4e-4;
  LevelSearchOptions fine;
  fine.linear_step = 1e-4;
  const double a = find_levels(pot, 1, std::nan(""), 0.0, coarse).energies.at(0);
  const double b = find_levels(pot, 1, std::nan(""), 0.0, fine).energies.at(0);
  CHECK(std::abs(a / b - 1.0) < 1e-10);
}

TEST_CASE("tail log derivative") {
  // k = 0: sqrt(r) K_{1/2}(lambda r) ~ e^{-lambda r}, log derivative -lambda.
  CHECK(std::abs(tail_log_derivative(0.0, 1.7, 3.0) + 1.7) < 1e-12);
  // Finite-difference check for a super-critical tail.
  const double k = 5.0;
  const double lambda = 0.3;
  const double r = 2.0;
  const BesselKImagOrder bk(std::sqrt(k - 0.25));
  const double h = 1e-5;
  auto u = [&](double rr) { return std::sqrt(rr) * bk(lambda * rr).k_value; };
  const double fd = (u(r + h) - u(r - h)) / (2.0 * h) / u(r);
  CHECK(std::abs(tail_log_derivative(k, lambda, r) - fd) < 1e-6 * std::abs(fd));
}

TEST_CASE("free solution of the zero potential") {
  // u = sinh(lambda r) / lambda with u'(0) = 1.
  const ShootingResult res = integrate_radial(RadialPotential::square_well(0.0, 1.0), 0.8, 3.0);
  CHECK(std::abs(res.end.u / (std::sinh(2.4) / 0.8) - 1.0) < 1e-10);
  CHECK(std::abs(res.end.du / std::cosh(2.4) - 1.0) < 1e-10);
  CHECK(res.nodes == 0);
  CHECK(res.end.r == 3.0);
}

TEST_CASE("energy and origin bounds for a constant inner well") {
  const RadialPotential pot = RadialPotential::piecewise([](double) { return -2.0; }, 2.0, 5.0);
  const LemmaCheck c = lemma_bounds_check(pot, 0.5, 0.5);
  CHECK(c.passed);
  CHECK(c.q > 0.0);
}

TEST_CASE("energy and origin bounds for the auxiliary potential") {
  const AuxiliaryPotential aux = auxiliary_potential(1);
  const RadialPotential pot = aux.base.radial();
  const double r0 = pot.tail_start;
  CHECK(r0 == node_radius(1));
  // V0 = eps0(., 1) is increasing past its minimum and stays below -W^2/r0^2.
  const LemmaCheck c = lemma_bounds_check(pot, 0.05, 5.0);
  CHECK(c.passed);
}

TEST_CASE("lemma preconditions") {
  const RadialPotential pot = RadialPotential::piecewise([](double) { return -2.0; }, 2.0, 5.0);
  CHECK_THROWS_AS(lemma_bounds_check(pot, 2.0, 0.5), PreconditionError);  // lambda r0 > sqrt k
  CHECK_THROWS_AS(lemma_bounds_check(pot, 0.5, 3.0), PreconditionError);  // tilde_r >= r0
  const RadialPotential weak = RadialPotential::piecewise([](double) { return -0.5; }, 2.0, 5.0);
  CHECK_THROWS_AS(lemma_bounds_check(weak, 0.5, 0.5), PreconditionError);  // |V0| < k/r0^2
  const RadialPotential falling =
      RadialPotential::piecewise([](double r) { return -2.0 - r; }, 2.0, 5.0);
  CHECK_THROWS_AS(lemma_bounds_check(falling, 0.5, 0.5), PreconditionError);
  CHECK_THROWS_AS(lemma_bounds_check(RadialPotential::square_well(3.0, 1.0), 0.5, 0.5),
                  PreconditionError);
}
