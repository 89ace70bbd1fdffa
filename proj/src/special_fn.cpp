#include "pontspec/special_fn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "pontspec/errors.hpp"

namespace pontspec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double lambert_seed(double x) {
  if (x < -0.25) {
    // Branch-point expansion in p = sqrt(2(e x + 1)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  }
  if (x <= 0.25) return x * (1.0 + x * (-1.0 + x * (1.5 - x * 8.0 / 3.0)));
  if (x < 3.0) {
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// y - atan(y), accurate for small y.
double y_minus_atan(double y) {
  if (y < 1e-2) {
    const double y2 = y * y;
    return y * y2 * (1.0 / 3.0 - y2 * (1.0 / 5.0 - y2 * (1.0 / 7.0 - y2 / 9.0)));
  }
  return y - std::atan(y);
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Pair {
  double k = 0.0;
  double dk = 0.0;
};

struct PanelResult {
  Pair kronrod;
  Pair error;
  Pair abs_kronrod;
};

class KIntegrand {
 public:
  KIntegrand(double beta, double tau) : beta_(beta), tau_(tau) {}
  Pair operator()(double t) const {
    const double ch = std::cosh(t);
    // Scaled by exp(tau) so that large tau keeps full relative precision;
    // the caller undoes the scaling.
    const double e = std::exp(-tau_ * (ch - 1.0));
    const double c = std::cos(beta_ * t);
    return {e * c, -ch * e * c};
  }

 private:
  double beta_;
  double tau_;
};

PanelResult gk15(const KIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Pair fc = f(center);
  Pair resk{fc.k * kWgk[7], fc.dk * kWgk[7]};
  Pair resg{fc.k * kWg[3], fc.dk * kWg[3]};
  Pair resabs{std::abs(fc.k) * kWgk[7], std::abs(fc.dk) * kWgk[7]};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Pair f1 = f(center - dx);
    const Pair f2 = f(center + dx);
    resk.k += kWgk[j] * (f1.k + f2.k);
    resk.dk += kWgk[j] * (f1.dk + f2.dk);
    resabs.k += kWgk[j] * (std::abs(f1.k) + std::abs(f2.k));
    resabs.dk += kWgk[j] * (std::abs(f1.dk) + std::abs(f2.dk));
    if (j % 2 == 1) {
      resg.k += kWg[j / 2] * (f1.k + f2.k);
      resg.dk += kWg[j / 2] * (f1.dk + f2.dk);
    }
  }
  PanelResult r;
  r.kronrod = {resk.k * half, resk.dk * half};
  r.error = {std::abs((resk.k - resg.k) * half), std::abs((resk.dk - resg.dk) * half)};
  r.abs_kronrod = {resabs.k * half, resabs.dk * half};
  return r;
}

void adaptive(const KIntegrand& f, double a, double b, const PanelResult& whole,
              double tol_k, double tol_dk, int depth, CompensatedSum& k,
              CompensatedSum& dk) {
  // Below ~50 ulp of the panel's L1 mass the Kronrod-Gauss difference is
  // rounding noise, so further bisection cannot help.
  const bool ok_k = whole.error.k <= std::max(tol_k, 50.0 * kEps * whole.abs_kronrod.k);
  const bool ok_dk = whole.error.dk <= std::max(tol_dk, 50.0 * kEps * whole.abs_kronrod.dk);
  if (depth == 0 || (ok_k && ok_dk)) {
    k.add(whole.kronrod.k);
    dk.add(whole.kronrod.dk);
    return;
  }
  const double mid = 0.5 * (a + b);
  const PanelResult left = gk15(f, a, mid);
  const PanelResult right = gk15(f, mid, b);
  adaptive(f, a, mid, left, 0.5 * tol_k, 0.5 * tol_dk, depth - 1, k, dk);
  adaptive(f, mid, b, right, 0.5 * tol_k, 0.5 * tol_dk, depth - 1, k, dk);
}

}  // namespace

LambertEval lambert_w0(double x) {
  if (!std::isfinite(x) || !(x > -kInvE)) {
    throw DomainError("lambert_w0: argument " + std::to_string(x) +
                      " outside the principal-branch domain (-1/e, inf)");
  }
  LambertEval out;
  out.argument = x;
  if (x == 0.0) return out;

  double w = lambert_seed(x);
  constexpr int kMaxIterations = 50;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - 0.5 * (w + 2.0) * f / wp1;
    const double step = f / denom;
    w -= step;
    if (!std::isfinite(w)) break;
    if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(w)) || f == 0.0) {
      out.value = w;
      out.iterations = it;
      out.residual = std::abs(w * std::exp(w) - x);
      return out;
    }
  }
  throw ConvergenceError("lambert_w0: Halley iteration did not converge for x = " +
                         std::to_string(x));
}

double omega_constant() {
  static const double omega = lambert_w0(1.0).value;
  return omega;
}

double arg_gamma_one_plus_i(double beta) {
  if (beta == 0.0) return 0.0;
  const double b = std::abs(beta);
  CompensatedSum sum;
  sum.add(-kEulerGamma * b);
  constexpr long kMaxTerms = 1000000;
  long n = 1;
  for (; n <= kMaxTerms; ++n) {
    const double term = y_minus_atan(b / static_cast<double>(n));
    sum.add(term);
    if (term < 1e-15) break;
  }
  n = std::min(n, kMaxTerms);
  // Euler-Maclaurin remainder for sum_{m > n} g(m), g(x) = beta/x - atan(beta/x).
  const double nn = static_cast<double>(n);
  const double y = b / nn;
  double integral;
  if (y < 1e-2) {
    const double y2 = y * y;
    integral = nn * y * y2 * (1.0 / 6.0 - y2 * (1.0 / 20.0 - y2 / 42.0));
  } else {
    integral = -b + nn * std::atan(y) + 0.5 * b * std::log1p(y * y);
  }
  const double g = y_minus_atan(y);
  const double dg = -b * b * b / (nn * nn * (nn * nn + b * b));
  sum.add(integral - 0.5 * g - dg / 12.0);
  const double phi = sum.value();
  return beta < 0.0 ? -phi : phi;
}

BetaConstants beta_constants_for_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("beta_constants: beta must be positive and finite");
  }
  BetaConstants c;
  c.beta = beta;
  c.phi_beta = arg_gamma_one_plus_i(beta);
  const double bp = beta * kPi;
  if (bp > 40.0) {
    // sinh(x) = e^x / 2 to double precision here; avoids overflow.
    c.c_beta = -std::sqrt(2.0 * kPi / beta) * std::exp(-0.5 * bp);
  } else {
    c.c_beta = -std::sqrt(kPi / (beta * std::sinh(bp)));
  }
  return c;
}

BetaConstants beta_constants(double k) {
  if (!(k > 0.25) || !std::isfinite(k)) {
    throw DomainError("beta_constants: k = " + std::to_string(k) +
                      " must exceed 1/4 for an oscillatory inverse-square tail");
  }
  return beta_constants_for_beta(std::sqrt(k - 0.25));
}

BesselKImagOrder::BesselKImagOrder(double beta)
    : constants_(beta_constants_for_beta(beta)) {}

BesselImOrder BesselKImagOrder::operator()(double tau) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("bessel_k_imag_order: tau must be positive and finite");
  }
  return tau <= kSmallArgument ? small_argument(tau) : quadrature(tau);
}

BesselKImagOrder::ThetaForm BesselKImagOrder::theta_form(double theta, double tau) const {
  const double beta = constants_.beta;
  const double x = 0.25 * tau * tau;
  std::complex<double> term{1.0, 0.0};
  std::complex<double> s = term;
  std::complex<double> tau_ds{0.0, 0.0};
  for (int j = 1; j < 40; ++j) {
    term *= x / (double(j) * std::complex<double>(j, beta));
    s += term;
    tau_ds += 2.0 * double(j) * term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
  }
  const std::complex<double> phase{std::cos(theta), std::sin(theta)};
  ThetaForm out;
  out.k_over_c = (phase * s).imag();
  out.tau_dk_over_c = (phase * (std::complex<double>(0.0, beta) * s + tau_ds)).imag();
  return out;
}

BesselImOrder BesselKImagOrder::small_argument(double tau) const {
  const double theta = constants_.beta * std::log(0.5 * tau) - constants_.phi_beta;
  const ThetaForm f = theta_form(theta, tau);
  BesselImOrder out;
  out.beta = constants_.beta;
  out.tau = tau;
  out.k_value = constants_.c_beta * f.k_over_c;
  out.k_derivative = constants_.c_beta * f.tau_dk_over_c / tau;
  return out;
}

BesselImOrder BesselKImagOrder::quadrature(double tau) const {
  BesselImOrder out = scaled_quadrature(tau);
  const double scale = std::exp(-tau);
  out.k_value *= scale;
  out.k_derivative *= scale;
  return out;
}

BesselImOrder BesselKImagOrder::scaled_quadrature(double tau) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("bessel_k_imag_order: tau must be positive and finite");
  }
  const double beta = constants_.beta;
  // exp(-tau (cosh t - 1)) < 1e-18 beyond t_max (41.45 = -ln 1e-18, padded).
  const double t_max = std::acosh(1.0 + 45.0 / tau);
  const KIntegrand f(beta, tau);

  // Panels short enough to resolve both the oscillation and the decay front.
  const double width = std::min(0.5, 0.25 * kPi / beta);
  const int panels = std::max(1, static_cast<int>(std::ceil(t_max / width)));
  const double h = t_max / panels;

  std::vector<PanelResult> first(static_cast<std::size_t>(panels));
  double l1_k = 0.0;
  double l1_dk = 0.0;
  for (int i = 0; i < panels; ++i) {
    first[static_cast<std::size_t>(i)] = gk15(f, i * h, (i + 1) * h);
    l1_k += first[static_cast<std::size_t>(i)].abs_kronrod.k;
    l1_dk += first[static_cast<std::size_t>(i)].abs_kronrod.dk;
  }
  const double tol_k = 1e-15 * l1_k / panels;
  const double tol_dk = 1e-15 * l1_dk / panels;

  CompensatedSum k;
  CompensatedSum dk;
  for (int i = 0; i < panels; ++i) {
    adaptive(f, i * h, (i + 1) * h, first[static_cast<std::size_t>(i)], tol_k, tol_dk, 30, k,
             dk);
  }
  BesselImOrder out;
  out.beta = beta;
  out.tau = tau;
  out.k_value = k.value();
  out.k_derivative = dk.value();
  return out;
}

double BesselKImagOrder::log_derivative(double tau) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError("bessel_k_imag_order: tau must be positive and finite");
  }
  const BesselImOrder v = tau <= kSmallArgument ? small_argument(tau) : scaled_quadrature(tau);
  return v.k_derivative / v.k_value;
}

BesselImOrder bessel_k_imag_order(double beta, double tau) {
  if (!(beta > 0.0)) throw DomainError("bessel_k_imag_order: beta must be positive");
  if (!(tau > 0.0)) throw DomainError("bessel_k_imag_order: tau must be positive");
  return BesselKImagOrder(beta)(tau);
}

}  // namespace pontspec
