#include "pontspec/efimov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pontspec/errors.hpp"
#include "pontspec/two_center.hpp"

namespace pontspec {

namespace {

// log of the smallest normal double, halved: tau^2 / r0^2 must stay normal.
const double kLogTauFloor = 0.5 * std::log(std::numeric_limits<double>::min());

// Matching function in the small-argument regime as a function of
// theta = beta log(tau/2) - phi, divided by C_beta.
double matching_theta(const BesselKImagOrder& bessel, double theta) {
  const BetaConstants& c = bessel.constants();
  const double tau = 2.0 * std::exp((theta + c.phi_beta) / c.beta);
  const double f_over_tau = tau > 0.0 ? matching_f(tau) / tau : 2.0;
  const BesselKImagOrder::ThetaForm f = bessel.theta_form(theta, tau);
  return f.k_over_c - f_over_tau * f.tau_dk_over_c;
}

double log_tau_of_theta(const BetaConstants& c, double theta) {
  return std::log(2.0) + (theta + c.phi_beta) / c.beta;
}

void finish(EfimovSpectrum& s, double r0, const BetaConstants* c) {
  s.taus.clear();
  for (double e : s.levels) s.taus.push_back(std::sqrt(-e) * r0);
  s.ratios.clear();
  for (std::size_t i = 0; i + 1 < s.levels.size(); ++i) {
    s.ratios.push_back(s.levels[i] / s.levels[i + 1]);
  }
  s.asymptotic_reference.clear();
  if (c) {
    for (int n : s.labels) {
      const double tau0 = asymptotic_tau(*c, n);
      s.asymptotic_reference.push_back(-tau0 * tau0 / (r0 * r0));
    }
  }
}

}  // namespace

RadialPotential PiecewisePotential::radial() const {
  RadialPotential p = RadialPotential::piecewise(inner, r0, k);
  p.breakpoints = breakpoints;
  return p;
}

PiecewisePotential PiecewisePotential::free_inside(double k, double r0) {
  PiecewisePotential p;
  p.inner = [](double) { return 0.0; };
  p.r0 = r0;
  p.k = k;
  return p;
}

double matching_f(double tau) {
  if (tau < 1e-4) return 2.0 * tau - 4.0 * tau * tau * tau / 3.0;
  const double th = std::tanh(tau);
  return 2.0 * tau * th / (2.0 * tau - th);
}

double matching_function(const BesselKImagOrder& bessel, double tau) {
  const BesselImOrder v = bessel(tau);
  return v.k_value - matching_f(tau) * v.k_derivative;
}

BetaConstants efimov_constants(double k) { return beta_constants(k); }

double asymptotic_tau(const BetaConstants& c, int n) {
  return 2.0 * std::exp((std::atan(2.0 * c.beta) + c.phi_beta - n * kPi) / c.beta);
}

std::vector<double> asymptotic_levels(double k, double r0, int n_first, int n_last) {
  if (!(r0 > 0.0)) throw DomainError("asymptotic_levels: r0 must be positive");
  const BetaConstants c = beta_constants(k);
  std::vector<double> out;
  for (int n = n_first; n <= n_last; ++n) {
    const double tau = asymptotic_tau(c, n);
    out.push_back(-tau * tau / (r0 * r0));
  }
  return out;
}

EfimovSpectrum analytic_levels(double k, double r0, int n_max) {
  if (!(k > 0.25)) {
    throw DomainError("analytic_levels: k = " + std::to_string(k) +
                      " <= 1/4 has no infinite level sequence");
  }
  if (!(r0 > 0.0)) throw DomainError("analytic_levels: r0 must be positive");
  const BesselKImagOrder bessel(std::sqrt(k - 0.25));
  const BetaConstants& c = bessel.constants();
  const double beta = c.beta;

  EfimovSpectrum s;
  s.beta = beta;
  s.geometric_ratio = std::exp(2.0 * kPi / beta);
  s.requested = n_max;
  const double log_floor = kLogTauFloor + std::log(r0);
  int label = 1;

  auto accept = [&](double log_tau, double residual) {
    const double tau = std::exp(log_tau);
    s.levels.push_back(-(tau / r0) * (tau / r0));
    s.labels.push_back(label++);
    s.residuals.push_back(residual);
  };
  auto relative_residual = [&](double tau) {
    const BesselImOrder v = bessel(tau);
    const double fk = matching_f(tau) * v.k_derivative;
    return std::abs(v.k_value - fk) / std::abs(fk);
  };

  // Quadrature regime. Every level has tau <= sqrt(k) (E >= min V = -k/r0^2).
  const double tau_switch = BesselKImagOrder::kSmallArgument;
  const double dlog = kPi / (8.0 * beta);
  double log_hi = std::log(std::sqrt(k) * (1.0 + 1e-9));
  double h_hi = matching_function(bessel, std::exp(log_hi));
  const double log_switch = std::log(tau_switch);
  while (log_hi > log_switch && static_cast<int>(s.levels.size()) < n_max) {
    const double log_lo = std::max(log_hi - dlog, log_switch);
    const double h_lo = matching_function(bessel, std::exp(log_lo));
    if ((h_lo < 0.0) != (h_hi < 0.0) && h_lo != 0.0) {
      double a = log_lo, b = log_hi, fa = h_lo;
      for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = matching_function(bessel, std::exp(m));
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      accept(root, relative_residual(std::exp(root)));
    } else if (h_lo == 0.0) {
      accept(log_lo, 0.0);
    }
    log_hi = log_lo;
    h_hi = h_lo;
  }

  // Small-argument regime, in theta. Index n root lies within pi/2 of
  // atan(2 beta) - n pi.
  const double theta_switch = beta * std::log(0.5 * tau_switch) - c.phi_beta;
  const double theta_star = std::atan(2.0 * beta);
  int n = static_cast<int>(std::floor((theta_star + 0.5 * kPi - theta_switch) / kPi));
  while (static_cast<int>(s.levels.size()) < n_max) {
    const double centre = theta_star - n * kPi;
    double a = centre - 0.5 * kPi;
    double b = std::min(centre + 0.5 * kPi, theta_switch);
    ++n;
    if (b <= a) continue;
    double fa = matching_theta(bessel, a);
    const double fb = matching_theta(bessel, b);
    if ((fa < 0.0) == (fb < 0.0)) continue;  // root already taken by the quadrature scan
    if (log_tau_of_theta(c, a) < log_floor) break;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = 0.5 * (a + b);
      const double fm = matching_theta(bessel, m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    const double theta = 0.5 * (a + b);
    const double log_tau = log_tau_of_theta(c, theta);
    if (log_tau < log_floor) break;
    const double tau = std::exp(log_tau);
    const double f_over_tau = tau > 0.0 ? matching_f(tau) / tau : 2.0;
    const BesselKImagOrder::ThetaForm f = bessel.theta_form(theta, tau);
    const double fk = f_over_tau * f.tau_dk_over_c;
    accept(log_tau, std::abs(f.k_over_c - fk) / std::abs(fk));
  }
  s.representable = static_cast<int>(s.levels.size());
  finish(s, r0, &c);
  return s;
}

EfimovSpectrum numeric_levels(const PiecewisePotential& potential, int n_max,
                              const LevelSearchOptions& options) {
  if (!potential.inner) throw DomainError("numeric_levels: inner potential missing");
  if (!(potential.r0 > 0.0)) throw DomainError("numeric_levels: r0 must be positive");
  const LevelSet set = find_levels(potential.radial(), n_max,
                                   std::numeric_limits<double>::quiet_NaN(), 0.0, options);
  EfimovSpectrum s;
  s.levels = set.energies;
  s.labels = set.labels;
  s.requested = n_max;
  s.representable = static_cast<int>(set.energies.size());
  if (potential.k > 0.25) {
    const BetaConstants c = beta_constants(potential.k);
    s.beta = c.beta;
    s.geometric_ratio = std::exp(2.0 * kPi / c.beta);
    finish(s, potential.r0, &c);
  } else {
    finish(s, potential.r0, nullptr);
  }
  return s;
}

AuxiliaryPotential auxiliary_potential(int m) {
  AuxiliaryPotential a;
  a.m = m;
  a.r_m = node_radius(m);
  a.base.inner = [](double r) {
    if (r <= 0.0) return 0.0;
    return epsilon0(TwoCenterParams{1.0, r}).value;
  };
  a.base.r0 = a.r_m;
  const double w = omega_constant();
  a.base.k = w * w;
  return a;
}

double auxiliary_perturbation_sup(int m, int samples, double span) {
  if (samples <= 0) throw DomainError("auxiliary_perturbation_sup: need samples");
  const double r_m = node_radius(m);
  const double w2 = omega_constant() * omega_constant();
  double sup = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double r = r_m + span * i / samples;
    const double e = epsilon0(TwoCenterParams{1.0, r}).value;
    sup = std::max(sup, std::abs(e + w2 / (r * r)));
  }
  return sup;
}

}  // namespace pontspec
