#pragma once

// Born-Oppenheimer treatment of one light particle (mass m) and two heavy
// ones (mass M) coupled by the non-local two-center interaction.
//
// Fast problem: [-(1/nu) Delta_x + two-center interaction] psi = eps(R) psi.
// The kinetic prefactor only rescales the spectrum, so eps(R) = eps0(R, t)/nu.
// Slow problem: [-(1/mu) Delta_R + eps(R)] Phi = E Phi, solved as
// u'' = mu (eps(R) - E) u, i.e. with the potential mu eps(R).

#include <vector>

namespace pontspec {

struct BOConfig {
  double m_light = 1.0;
  double M_heavy = 1.0;
  double t_theta = 1.0;

  double nu() const { return 2.0 * M_heavy / (2.0 * M_heavy + m_light); }
  double mu() const { return M_heavy / (2.0 * m_light); }
  void validate() const;
};

/// eps(R) = eps0(R, t)/nu. Throws DomainError when eps0 does not exist at R.
double effective_potential(const BOConfig& config, double r);

/// The same energy from bisection on sqrt(nu lambda) r + g0 = e^{-sqrt(nu lambda) r}.
double effective_potential_direct(const BOConfig& config, double r);

/// Large-R value of eps: -(1 - t)^2 / (2 nu) (zero at t = 1).
double effective_threshold(const BOConfig& config);

struct ScalingValidation {
  int points = 0;
  double max_relative_deviation = 0.0;
  bool passed = false;
};

/// Compares effective_potential with effective_potential_direct on `points`
/// log-spaced radii in [r_lo, r_hi].
ScalingValidation validate_nu_scaling(const BOConfig& config, int points = 50, double r_lo = 0.05,
                                      double r_hi = 40.0);

struct BOSpectrum {
  std::vector<double> levels;  // E_n, deepest first
  std::vector<int> labels;
  std::vector<double> ratios;  // (E_n - thr)/(E_{n+1} - thr)
  double effective_k = 0.0;       // mu W(1)^2 / nu, tail strength of the slow equation
  double effective_k_fast = 0.0;  // W(1)^2 / nu, the criterion stated without mu
  bool efimov_regime = false;     // t = 1 and effective_k > 1/4
  double beta = 0.0;
  double geometric_ratio = 0.0;
  double threshold = 0.0;       // continuum edge of the slow problem
  double potential_min = 0.0;   // min over R of eps(R)
  bool bounded_below = false;   // E_1 >= potential_min
  ScalingValidation scaling;
};

/// Up to n_max slow levels. Sub-critical configurations return their finite
/// level list with efimov_regime = false.
BOSpectrum bo_levels(const BOConfig& config, int n_max);

}  // namespace pontspec
