#include "pontspec/born_oppenheimer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pontspec/errors.hpp"
#include "pontspec/ode_oracle.hpp"
#include "pontspec/special_fn.hpp"
#include "pontspec/two_center.hpp"

namespace pontspec {

namespace {

// Node radius beyond which the t = 1 potential is replaced by its exact
// inverse-square tail; eps0 meets -W(1)^2/R^2 there, so V stays continuous.
constexpr int kTailNode = 9;
// Plateau cut for t < 1, where eps0 - threshold is below 1e-15 relative.
constexpr double kPlateauCut = 60.0;

}  // namespace

void BOConfig::validate() const {
  if (!(m_light > 0.0) || !std::isfinite(m_light) || !(M_heavy > 0.0) ||
      !std::isfinite(M_heavy)) {
    throw DomainError("BO config: masses must be positive and finite");
  }
  if (!std::isfinite(t_theta)) throw DomainError("BO config: t_theta must be finite");
}

double effective_potential(const BOConfig& config, double r) {
  config.validate();
  const EffectiveEigenvalue e = epsilon0(TwoCenterParams{config.t_theta, r});
  if (!e.exists) {
    throw DomainError("effective_potential: no even-sector level at R = " + std::to_string(r) +
                      " for t_theta = " + std::to_string(config.t_theta));
  }
  return e.value / config.nu();
}

double effective_potential_direct(const BOConfig& config, double r) {
  config.validate();
  const TwoCenterParams p{config.t_theta, r};
  const double g0 = g_functions(p).g0;
  const double s_nu = std::sqrt(config.nu());
  // phi(q) = sqrt(nu) q r + g0 - e^{-sqrt(nu) q r} is increasing in q = sqrt(lambda).
  auto phi = [&](double q) { return s_nu * q * r + g0 - std::exp(-s_nu * q * r); };
  if (!(phi(0.0) < 0.0)) {
    throw DomainError("effective_potential_direct: no root at R = " + std::to_string(r));
  }
  double lo = 0.0;
  double hi = 1.0 / r;
  while (phi(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double q = 0.5 * (lo + hi);
  return -q * q;
}

double effective_threshold(const BOConfig& config) {
  const double d = 1.0 - config.t_theta;
  return config.t_theta < 1.0 ? -d * d / (2.0 * config.nu()) : 0.0;
}

ScalingValidation validate_nu_scaling(const BOConfig& config, int points, double r_lo,
                                      double r_hi) {
  ScalingValidation v;
  v.points = points;
  for (int i = 0; i < points; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, points > 1 ? double(i) / (points - 1) : 0.0);
    const double a = effective_potential(config, r);
    const double b = effective_potential_direct(config, r);
    v.max_relative_deviation = std::max(v.max_relative_deviation, std::abs(a / b - 1.0));
  }
  v.passed = v.max_relative_deviation <= 1e-9;
  return v;
}

BOSpectrum bo_levels(const BOConfig& config, int n_max) {
  config.validate();
  if (config.t_theta > 1.0) {
    throw DomainError("bo_levels: t_theta > 1 leaves eps(R) undefined near R = 0");
  }
  const double nu = config.nu();
  const double mu = config.mu();
  const double w = omega_constant();

  BOSpectrum s;
  s.effective_k = mu * w * w / nu;
  s.effective_k_fast = w * w / nu;
  s.threshold = effective_threshold(config);
  s.scaling = validate_nu_scaling(config);
  if (!s.scaling.passed) {
    throw ConvergenceError("bo_levels: nu-scaled potential disagrees with direct root-finding by " +
                           std::to_string(s.scaling.max_relative_deviation));
  }

  const bool unitary = config.t_theta == 1.0;
  const double threshold = s.threshold;
  RadialPotential pot;
  pot.inner = [config, mu, threshold](double r) {
    if (r <= 0.0) return 0.0;
    return mu * (effective_potential(config, r) - threshold);
  };
  if (unitary) {
    pot.tail_start = node_radius(kTailNode);
    pot.tail_k = s.effective_k;
  } else {
    pot.tail_start = kPlateauCut;
    pot.tail_k = 0.0;
  }
  s.efimov_regime = unitary && s.effective_k > 0.25;
  if (s.effective_k > 0.25) {
    s.beta = std::sqrt(s.effective_k - 0.25);
    s.geometric_ratio = std::exp(2.0 * kPi / s.beta);
  }

  const LevelSet set = find_levels(pot, n_max);
  for (double e : set.energies) s.levels.push_back(threshold + e / mu);
  s.labels = set.labels;
  for (std::size_t i = 0; i + 1 < s.levels.size(); ++i) {
    s.ratios.push_back((s.levels[i] - threshold) / (s.levels[i + 1] - threshold));
  }

  // Minimum of eps on a fine grid; eps is smooth with a single well.
  double vmin = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    const double r = pot.tail_start * i / 4000.0;
    vmin = std::min(vmin, effective_potential(config, r));
  }
  s.potential_min = vmin;
  s.bounded_below = s.levels.empty() || s.levels.front() >= vmin;
  return s;
}

}  // namespace pontspec
