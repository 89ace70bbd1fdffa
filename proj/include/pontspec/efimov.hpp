#pragma once

// Bound states of -Delta + V with V bounded on [0, r0] and -k/r^2 beyond.
// For V = 0 inside, levels solve K_{i beta}(tau) = f(tau) K'_{i beta}(tau)
// with tau = sqrt(-E) r0; the general case goes through the ODE oracle.

#include <functional>
#include <vector>

#include "pontspec/ode_oracle.hpp"
#include "pontspec/special_fn.hpp"

namespace pontspec {

struct PiecewisePotential {
  std::function<double(double)> inner;  // V0 on [0, r0], non-positive and bounded
  double r0 = 1.0;
  double k = 0.0;
  std::vector<double> breakpoints;  // optional interior junctions of V0

  RadialPotential radial() const;
  static PiecewisePotential free_inside(double k, double r0);
};

struct EfimovSpectrum {
  std::vector<double> levels;  // E_n, deepest first
  std::vector<int> labels;     // n, ground state = 1
  std::vector<double> taus;    // sqrt|E_n| r0
  std::vector<double> ratios;  // E_n / E_{n+1}
  std::vector<double> asymptotic_reference;  // closed form with zeta_n = 0, per label
  std::vector<double> residuals;  // relative matching residual per level (analytic solver)
  double beta = 0.0;
  double geometric_ratio = 0.0;  // e^{2 pi / beta}
  int requested = 0;
  int representable = 0;  // < requested when deeper levels underflow double
};

/// 2 tau tanh(tau) / (2 tau - tanh(tau)), with its series below tau = 1e-4.
double matching_f(double tau);

/// K(tau) - f(tau) K'(tau) with the quadrature / small-argument switch.
double matching_function(const BesselKImagOrder& bessel, double tau);

/// tau_n^0 = 2 exp((atan(2 beta) + phi_beta - n pi) / beta).
double asymptotic_tau(const BetaConstants& c, int n);

/// E_n = -(4/r0^2) exp((2/beta)(atan(2 beta) + phi_beta - n pi)) for n in [n_first, n_last].
std::vector<double> asymptotic_levels(double k, double r0, int n_first, int n_last);

/// The n_max shallowest-first roots of the matching equation, ordered from the
/// ground state. Throws DomainError for k <= 1/4.
EfimovSpectrum analytic_levels(double k, double r0, int n_max);

/// Levels of an arbitrary piecewise potential from the shooting oracle.
EfimovSpectrum numeric_levels(const PiecewisePotential& potential, int n_max,
                              const LevelSearchOptions& options = {});

struct AuxiliaryPotential {
  int m = 0;
  double r_m = 0.0;
  PiecewisePotential base;  // inner = epsilon0(., 1), tail -W(1)^2 / r^2 beyond r_m
};

AuxiliaryPotential auxiliary_potential(int m);

/// max over `samples` points r in (r_m, r_m + span] of |epsilon0(r,1) + W(1)^2/r^2|.
double auxiliary_perturbation_sup(int m, int samples = 200, double span = 60.0);

/// Asymptotic-formula constants for a tail strength k: beta, phi_beta, C_beta.
BetaConstants efimov_constants(double k);

}  // namespace pontspec
