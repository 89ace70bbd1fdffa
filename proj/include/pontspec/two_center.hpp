#pragma once

// Closed-form results for the non-local symmetric two-center interaction:
// Lambert-W eigenvalues, boundary strength alpha(r, t), scattering length and
// generalized eigenfunctions.

#include <optional>

#include "pontspec/gamma_matrices.hpp"

namespace pontspec {

struct TwoCenterParams {
  double t_theta = 1.0;  // tan(theta/2)
  double r = 1.0;        // center separation

  void validate() const;
  /// Centers on the z axis, symmetric about the origin.
  Vec3 y1() const { return {0.0, 0.0, -0.5 * r}; }
  Vec3 y2() const { return {0.0, 0.0, 0.5 * r}; }
};

struct GFunctions {
  double g0 = 0.0;
  double g1 = 0.0;
};

/// g0 = (t-1)x + E, g1 = (t-1)x - E with x = r/sqrt2 and
/// E = e^{-x}(t sin x + cos x).
GFunctions g_functions(const TwoCenterParams& p);

/// 1 - g0 evaluated without cancellation at small r.
double one_minus_g0(const TwoCenterParams& p);

enum class Branch { even, odd };

struct EffectiveEigenvalue {
  double value = 0.0;  // -lambda, or 0 when !exists
  Branch branch = Branch::even;
  double g = 0.0;
  bool exists = false;
  double sqrt_lambda = 0.0;
};

/// Even-sector eigenvalue -(W(e^{g0}) - g0)^2 / r^2, present iff g0 < 1
/// (g0 = 1 is reported as the threshold value 0).
EffectiveEigenvalue epsilon0(const TwoCenterParams& p);

/// Odd-sector eigenvalue -(W0(-e^{g1}) - g1)^2 / r^2, present iff g1 < -1.
EffectiveEigenvalue epsilon1(const TwoCenterParams& p);

/// alpha(r, t) = (t-1)/(4 pi sqrt2) + E/(4 pi r).
double alpha_boundary(const TwoCenterParams& p);

/// Relative imbalance of the even eigenvalue equation
///   sqrt(lambda) r + g0 = e^{-sqrt(lambda) r},
/// normalised by the largest term.
double even_equation_residual(const TwoCenterParams& p, double sqrt_lambda);

/// sqrt(lambda)/(4 pi) + alpha(r,t) - sign * G^lambda(r), sign = +1 or -1.
double alpha_form_equation(const TwoCenterParams& p, double lambda, int sign);

/// a = 2r / (1 - g0). Throws SingularMatrixError when |1 - g0| <= 1e-12
/// (zero-energy resonance, infinite scattering length).
double scattering_length_theta(const TwoCenterParams& p);

/// Gamma_theta(k^2 + i0), i.e. sqrt(-z) = -i|k|.
GammaMatrix gamma_on_shell(const TwoCenterParams& p, double k_abs);

/// Plane wave plus the two outgoing spherical waves weighted by Gamma^{-1}.
Complex generalized_eigenfunction(const TwoCenterParams& p, const Vec3& k, const Vec3& x);

/// (1/4pi) sum_{mn} [Gamma(k^2)^{-1}]_{mn} e^{i(k.y_n - |k| omega.y_m)} for
/// incoming momentum k and outgoing unit direction omega.
Complex scattering_amplitude(const TwoCenterParams& p, const Vec3& k, const Vec3& omega);

struct ScatteringRecord {
  Vec3 k_vector{};
  Complex amplitude{};
  double scattering_length = 0.0;
};

/// Forward-scattering record (omega = k/|k|).
ScatteringRecord scattering_record(const TwoCenterParams& p, const Vec3& k);

/// R_m = sqrt2 (3 pi/4 + m pi), where g0(R_m, 1) = 0.
double node_radius(int m);

}  // namespace pontspec
