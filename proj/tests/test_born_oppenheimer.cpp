#include <cmath>
#include <random>

#include "doctest.h"
#include "pontspec/born_oppenheimer.hpp"
#include "pontspec/errors.hpp"
#include "pontspec/special_fn.hpp"
#include "pontspec/two_center.hpp"

using namespace pontspec;

TEST_CASE("mass factors") {
  const BOConfig c{1.0, 20.0, 1.0};
  CHECK(c.nu() == doctest::Approx(40.0 / 41.0).epsilon(1e-15));
  CHECK(c.mu() == 10.0);
  CHECK_THROWS_AS((BOConfig{0.0, 1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((BOConfig{1.0, -1.0, 1.0}.validate()), DomainError);
}

TEST_CASE("nu-scaled potential matches direct root-finding") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-2.0, 1.0);
  std::uniform_real_distribution<double> lm(-1.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const BOConfig c{1.0, std::pow(10.0, lm(rng)), ut(rng)};
    const ScalingValidation v = validate_nu_scaling(c);
    CHECK(v.points == 50);
    CHECK(v.passed);
  }
}

TEST_CASE("infinite heavy mass limit of the fast energy") {
  // nu -> 1: eps(R) -> eps0(R, t).
  const BOConfig c{1.0, 1e12, 1.0};
  for (double r : {0.3, 2.0, 11.0}) {
    CHECK(std::abs(effective_potential(c, r) / epsilon0(TwoCenterParams{1.0, r}).value - 1.0) <
          1e-11);
  }
}

TEST_CASE("super-critical ground level and geometric ratios") {
  const BOSpectrum s = bo_levels(BOConfig{1.0, 20.0, 1.0}, 6);
  REQUIRE(s.levels.size() >= 5);
  CHECK(s.efimov_regime);
  CHECK(std::abs(s.levels[0] / -0.0121114944899354 - 1.0) < 1e-8);
  for (int n = 3; n <= 5; ++n) CHECK(std::abs(s.ratios[n - 1] / s.geometric_ratio - 1.0) < 0.05);
  CHECK(s.bounded_below);
  CHECK(s.levels[0] >= s.potential_min);
  CHECK(s.potential_min < 0.0);
  const double w2 = omega_constant() * omega_constant();
  CHECK(std::abs(s.effective_k / (10.0 * w2 * 41.0 / 40.0) - 1.0) < 1e-14);
  CHECK(s.threshold == 0.0);
}

TEST_CASE("equal masses stay sub-critical") {
  const BOSpectrum s = bo_levels(BOConfig{1.0, 1.0, 1.0}, 4);
  CHECK(s.effective_k < 0.25);
  CHECK_FALSE(s.efimov_regime);
  CHECK(s.levels.size() < 4);
  CHECK(s.beta == 0.0);
}

TEST_CASE("finite tan(theta/2) below one gives a finite spectrum above the plateau") {
  const BOConfig c{1.0, 20.0, 0.5};
  const BOSpectrum s = bo_levels(c, 40);
  CHECK_FALSE(s.efimov_regime);
  REQUIRE_FALSE(s.levels.empty());
  CHECK(s.levels.size() < 40);
  CHECK(s.threshold == doctest::Approx(-0.125 / c.nu()).epsilon(1e-15));
  for (double e : s.levels) {
    CHECK(e < s.threshold);
    CHECK(e >= s.potential_min);
  }
}

TEST_CASE("t > 1 is rejected") {
  CHECK_THROWS_AS(bo_levels(BOConfig{1.0, 20.0, 1.2}, 3), DomainError);
}
