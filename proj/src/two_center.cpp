#include "pontspec/two_center.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pontspec/errors.hpp"
#include "pontspec/special_fn.hpp"

namespace pontspec {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double e_term(double t, double x) { return std::exp(-x) * (t * std::sin(x) + std::cos(x)); }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

void TwoCenterParams::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("two-center: r must be positive and finite, got " + std::to_string(r));
  }
  if (!std::isfinite(t_theta)) throw DomainError("two-center: t_theta must be finite");
}

GFunctions g_functions(const TwoCenterParams& p) {
  p.validate();
  const double x = p.r / kSqrt2;
  const double lin = (p.t_theta - 1.0) * x;
  const double e = e_term(p.t_theta, x);
  return {lin + e, lin - e};
}

double one_minus_g0(const TwoCenterParams& p) {
  p.validate();
  const double x = p.r / kSqrt2;
  const double ex = std::exp(-x);
  const double half = std::sin(0.5 * x);
  // 1 - e^{-x} cos x = -expm1(-x) + 2 e^{-x} sin^2(x/2)
  return (-std::expm1(-x) - p.t_theta * ex * std::sin(x)) + 2.0 * ex * half * half +
         (1.0 - p.t_theta) * x;
}

EffectiveEigenvalue epsilon0(const TwoCenterParams& p) {
  const GFunctions g = g_functions(p);
  const double d = one_minus_g0(p);
  EffectiveEigenvalue out;
  out.branch = Branch::even;
  out.g = g.g0;
  if (d < 0.0) return out;
  out.exists = true;
  if (d == 0.0) return out;

  // sigma = sqrt(lambda) r solves sigma + g0 = e^{-sigma}, i.e.
  // h(sigma) = sigma - expm1(-sigma) - (1 - g0) = 0.
  double sigma = d < 1e-3 ? 0.5 * d : lambert_w0_value(std::exp(g.g0)) - g.g0;
  for (int i = 0; i < 3; ++i) {
    const double h = sigma - std::expm1(-sigma) - d;
    sigma -= h / (1.0 + std::exp(-sigma));
  }
  out.sqrt_lambda = sigma / p.r;
  out.value = -out.sqrt_lambda * out.sqrt_lambda;
  return out;
}

EffectiveEigenvalue epsilon1(const TwoCenterParams& p) {
  const GFunctions g = g_functions(p);
  EffectiveEigenvalue out;
  out.branch = Branch::odd;
  out.g = g.g1;
  const double d = -1.0 - g.g1;
  if (d < 0.0) return out;
  out.exists = true;
  if (d == 0.0) return out;

  // sigma + g1 = -e^{-sigma}, i.e. h(sigma) = sigma + expm1(-sigma) - (-1 - g1) = 0.
  const double arg = -std::exp(g.g1);
  double sigma = arg > -kInvE ? lambert_w0_value(arg) - g.g1 : std::sqrt(2.0 * d);
  if (d < 1e-6) sigma = std::sqrt(2.0 * d);  // branch-point sensitivity of W
  for (int i = 0; i < 3 && sigma > 0.0; ++i) {
    const double h = sigma + std::expm1(-sigma) - d;
    sigma -= h / -std::expm1(-sigma);
  }
  out.sqrt_lambda = sigma / p.r;
  out.value = -out.sqrt_lambda * out.sqrt_lambda;
  return out;
}

double alpha_boundary(const TwoCenterParams& p) {
  p.validate();
  const double x = p.r / kSqrt2;
  return (p.t_theta - 1.0) / (4.0 * kPi * kSqrt2) + e_term(p.t_theta, x) / (4.0 * kPi * p.r);
}

double even_equation_residual(const TwoCenterParams& p, double sqrt_lambda) {
  const GFunctions g = g_functions(p);
  const double a = sqrt_lambda * p.r;
  const double rhs = std::exp(-a);
  const double scale = std::max({std::abs(a), std::abs(g.g0), rhs});
  return std::abs(a + g.g0 - rhs) / scale;
}

double alpha_form_equation(const TwoCenterParams& p, double lambda, int sign) {
  if (!(lambda > 0.0)) throw DomainError("alpha_form_equation: lambda must be positive");
  return std::sqrt(lambda) / (4.0 * kPi) + alpha_boundary(p) -
         static_cast<double>(sign) * green_function(lambda, p.r);
}

double scattering_length_theta(const TwoCenterParams& p) {
  const double d = one_minus_g0(p);
  if (std::abs(d) <= 1e-12) {
    throw SingularMatrixError("scattering_length_theta: zero-energy resonance at r = " +
                              std::to_string(p.r) + ", t_theta = " + std::to_string(p.t_theta) +
                              " (infinite scattering length)");
  }
  return 2.0 * p.r / d;
}

GammaMatrix gamma_on_shell(const TwoCenterParams& p, double k_abs) {
  p.validate();
  if (!(k_abs >= 0.0)) throw DomainError("gamma_on_shell: |k| must be non-negative");
  return gamma_nonlocal_at_root(p.t_theta, p.r, Complex{0.0, -k_abs});
}

Complex generalized_eigenfunction(const TwoCenterParams& p, const Vec3& k, const Vec3& x) {
  const double k_abs = std::sqrt(dot(k, k));
  const std::array<Vec3, 2> y = {p.y1(), p.y2()};
  const GammaMatrix inv = gamma_on_shell(p, k_abs).inverse();
  Complex psi = std::exp(Complex{0.0, dot(k, x)});
  for (std::size_t m = 0; m < 2; ++m) {
    const double d = distance(x, y[m]);
    if (!(d > 0.0)) throw DomainError("generalized_eigenfunction: x coincides with a center");
    const Complex wave = std::exp(Complex{0.0, k_abs * d}) / (4.0 * kPi * d);
    for (std::size_t n = 0; n < 2; ++n) {
      psi += inv(m, n) * std::exp(Complex{0.0, dot(k, y[n])}) * wave;
    }
  }
  return psi;
}

Complex scattering_amplitude(const TwoCenterParams& p, const Vec3& k, const Vec3& omega) {
  const double k_abs = std::sqrt(dot(k, k));
  const std::array<Vec3, 2> y = {p.y1(), p.y2()};
  const GammaMatrix inv = gamma_on_shell(p, k_abs).inverse();
  Complex f{};
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      f += inv(m, n) * std::exp(Complex{0.0, dot(k, y[n]) - k_abs * dot(omega, y[m])});
    }
  }
  return f / (4.0 * kPi);
}

ScatteringRecord scattering_record(const TwoCenterParams& p, const Vec3& k) {
  const double k_abs = std::sqrt(dot(k, k));
  if (!(k_abs > 0.0)) throw DomainError("scattering_record: k must be non-zero");
  ScatteringRecord rec;
  rec.k_vector = k;
  rec.amplitude = scattering_amplitude(p, k, {k[0] / k_abs, k[1] / k_abs, k[2] / k_abs});
  rec.scattering_length = scattering_length_theta(p);
  return rec;
}

double node_radius(int m) {
  if (m < 0) throw DomainError("node_radius: m must be non-negative");
  return kSqrt2 * (0.75 * kPi + m * kPi);
}

}  // namespace pontspec
