#pragma once

// Special-function kernels shared by every spectral module: the principal
// branch of the Lambert W function, the modified Bessel function of purely
// imaginary order K_{i beta}(tau) with its tau-derivative, and the constants
// of its small-argument expansion.

#include <numbers>

namespace pontspec {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvE = 0.36787944117144233;  // 1/e, branch point of W
inline constexpr double kEulerGamma = std::numbers::egamma;

struct LambertEval {
  double argument = 0.0;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |w e^w - x|
};

/// Principal branch W0(x) for x > -1/e, by Halley iteration.
/// Throws DomainError for x <= -1/e or non-finite x, ConvergenceError if the
/// iteration cap (50) is hit.
LambertEval lambert_w0(double x);

/// Convenience: value only.
inline double lambert_w0_value(double x) { return lambert_w0(x).value; }

/// W0(1), the omega constant.
double omega_constant();

struct BetaConstants {
  double beta = 0.0;
  double phi_beta = 0.0;  // arg Gamma(1 + i beta), continuous in beta
  double c_beta = 0.0;    // -sqrt(pi / (beta sinh(beta pi)))
};

/// Constants for an inverse-square tail -k/r^2 with k > 1/4 (beta = sqrt(k - 1/4)).
BetaConstants beta_constants(double k);

/// Same constants parametrised directly by beta > 0.
BetaConstants beta_constants_for_beta(double beta);

/// arg Gamma(1 + i beta) from -gamma*beta + sum_n (beta/n - atan(beta/n)),
/// truncated when the increment drops below 1e-15 and closed with an
/// Euler-Maclaurin tail.
double arg_gamma_one_plus_i(double beta);

struct BesselImOrder {
  double beta = 0.0;
  double tau = 0.0;
  double k_value = 0.0;       // K_{i beta}(tau)
  double k_derivative = 0.0;  // d/dtau K_{i beta}(tau)
};

/// K_{i beta} evaluator with the order-dependent constants computed once.
///
/// For tau above kSmallArgument the integral representation
///   K_{i beta}(tau) = int_0^inf exp(-tau cosh t) cos(beta t) dt
/// is evaluated by adaptive Gauss-Kronrod quadrature, truncated where the
/// integrand has decayed by 1e-18 relative to t = 0. Below the threshold the
/// ascending series is used in the form
///   K = C_beta Im(e^{i theta} S),  theta = beta log(tau/2) - phi_beta,
///   S = sum_j (tau^2/4)^j / (j! (1 + i beta)_j),
/// whose j = 0 term is the leading law K ~ C_beta sin(theta).
class BesselKImagOrder {
 public:
  static constexpr double kSmallArgument = 1e-3;

  explicit BesselKImagOrder(double beta);

  BesselImOrder operator()(double tau) const;
  BesselImOrder quadrature(double tau) const;
  BesselImOrder small_argument(double tau) const;

  struct ThetaForm {
    double k_over_c = 0.0;      // K / C_beta
    double tau_dk_over_c = 0.0; // tau K' / C_beta
  };
  /// The series form with the phase theta supplied directly, so that levels
  /// with tau below the double range still have a well-defined equation.
  /// tau only enters the O(tau^2) corrections and may underflow to zero.
  ThetaForm theta_form(double theta, double tau) const;

  /// Value and derivative multiplied by e^tau (no underflow at large tau).
  BesselImOrder scaled_quadrature(double tau) const;

  /// K'/K, the logarithmic derivative with respect to tau.
  double log_derivative(double tau) const;

  const BetaConstants& constants() const { return constants_; }

 private:
  BetaConstants constants_;
};

/// One-shot evaluation; prefer BesselKImagOrder when evaluating repeatedly.
BesselImOrder bessel_k_imag_order(double beta, double tau);

}  // namespace pontspec
