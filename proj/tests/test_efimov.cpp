#include <cmath>

#include "doctest.h"
#include "pontspec/efimov.hpp"
#include "pontspec/errors.hpp"
#include "pontspec/two_center.hpp"

using namespace pontspec;

namespace {

constexpr double kTau[] = {0.97924612683326113411,  0.23420847060480751866,
                           0.055450619236631423591, 0.013119154745276957744,
                           0.0031037595753878443005, 0.00073429289272294941558};

}  // namespace

TEST_CASE("matching roots against 50-digit references") {
  const EfimovSpectrum s = analytic_levels(5.0, 1.0, 6);
  REQUIRE(s.levels.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CAPTURE(i);
    CHECK(s.labels[i] == i + 1);
    CHECK(std::abs(s.taus[i] / kTau[i] - 1.0) < 1e-12);
    CHECK(std::abs(s.levels[i] / -(kTau[i] * kTau[i]) - 1.0) < 2e-12);
  }
}

TEST_CASE("levels scale as 1/r0^2") {
  const EfimovSpectrum a = analytic_levels(5.0, 1.0, 3);
  const EfimovSpectrum b = analytic_levels(5.0, 2.5, 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(b.levels[i] * 6.25 / a.levels[i] - 1.0) < 1e-12);
}

TEST_CASE("geometric ratio law and the closed form") {
  const EfimovSpectrum s = analytic_levels(5.0, 1.0, 7);
  const double g = std::exp(2.0 * kPi / std::sqrt(4.75));
  CHECK(std::abs(s.geometric_ratio / g - 1.0) < 1e-15);
  // Ratios approach the law from above as the levels deepen into the tail.
  for (int n = 3; n <= 6; ++n) CHECK(std::abs(s.ratios[n - 1] / g - 1.0) < 1e-2);
  CHECK(std::abs(s.ratios[5] / g - 1.0) < std::abs(s.ratios[2] / g - 1.0));
  const std::vector<double> ref = asymptotic_levels(5.0, 1.0, 5, 5);
  CHECK(std::abs(s.levels[4] / ref[0] - 1.0) < 1e-2);
  CHECK(std::abs(s.asymptotic_reference[4] / ref[0] - 1.0) < 1e-15);
}

TEST_CASE("matching function vanishes at the roots") {
  const BesselKImagOrder bk(std::sqrt(4.75));
  for (double tau : kTau) {
    const BesselImOrder b = bk(tau);
    const double scale = std::abs(b.k_value) + std::abs(matching_f(tau) * b.k_derivative);
    CHECK(std::abs(matching_function(bk, tau)) < 1e-10 * scale + 1e-300);
  }
}

TEST_CASE("matching_f series branch is continuous") {
  const double below = matching_f(std::nextafter(1e-4, 0.0));
  const double above = matching_f(1e-4);
  CHECK(std::abs(below / above - 1.0) < 1e-14);
  CHECK(std::abs(matching_f(1e-10) / 2e-10 - 1.0) < 1e-15);  // f ~ 2 tau
  CHECK(std::abs(matching_f(50.0) - 100.0 / 99.0) < 1e-13);
}

TEST_CASE("shooting oracle reproduces the analytic levels") {
  const EfimovSpectrum a = analytic_levels(5.0, 1.0, 3);
  const EfimovSpectrum n = numeric_levels(PiecewisePotential::free_inside(5.0, 1.0), 3);
  REQUIRE(n.levels.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(n.levels[i] / a.levels[i] - 1.0) < 1e-6);
}

TEST_CASE("sub-critical tails are rejected") {
  CHECK_THROWS_AS(analytic_levels(0.25, 1.0, 3), DomainError);
  CHECK_THROWS_AS(analytic_levels(0.1, 1.0, 3), DomainError);
  CHECK_THROWS_AS(efimov_constants(0.2), DomainError);
}

TEST_CASE("deep levels stop at the double range") {
  const EfimovSpectrum s = analytic_levels(5.0, 1.0, 400);
  CHECK(s.requested == 400);
  CHECK(s.representable < 400);
  CHECK(s.levels.size() == std::size_t(s.representable));
  for (double e : s.levels) {
    CHECK(e < 0.0);
    CHECK(std::isnormal(e));
  }
}

TEST_CASE("perturbation of the auxiliary potential is bounded") {
  for (int m = 1; m <= 3; ++m) {
    const double sup = auxiliary_perturbation_sup(m);
    CAPTURE(m);
    CHECK(sup <= std::exp(-m * kPi) / (m * m));
    CHECK(sup > 0.0);
  }
  const AuxiliaryPotential aux = auxiliary_potential(2);
  CHECK(aux.r_m == node_radius(2));
  CHECK(std::abs(aux.base.k - omega_constant() * omega_constant()) < 1e-15);
}
