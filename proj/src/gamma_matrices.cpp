#include "pontspec/gamma_matrices.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pontspec/errors.hpp"
#include "pontspec/special_fn.hpp"

namespace pontspec {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

const Complex kSqrtI{1.0 / kSqrt2, 1.0 / kSqrt2};

}  // namespace

double distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

double green_function(double lambda, double r) {
  if (!(r > 0.0) || !std::isfinite(r) || !(lambda >= 0.0)) {
    throw DomainError("green_function: need r > 0 and lambda >= 0");
  }
  return std::exp(-std::sqrt(lambda) * r) / (4.0 * kPi * r);
}

CenterConfig CenterConfig::local(std::vector<Vec3> positions, std::vector<double> alphas) {
  CenterConfig c;
  c.positions = std::move(positions);
  c.alphas = std::move(alphas);
  c.validate();
  return c;
}

CenterConfig CenterConfig::symmetric_pair(double alpha, double r) {
  return local({Vec3{0.0, 0.0, -0.5 * r}, Vec3{0.0, 0.0, 0.5 * r}}, {alpha, alpha});
}

CenterConfig CenterConfig::nonlocal(double t_theta, double r) {
  CenterConfig c;
  c.positions = {Vec3{0.0, 0.0, -0.5 * r}, Vec3{0.0, 0.0, 0.5 * r}};
  c.t_theta = t_theta;
  c.validate();
  return c;
}

void CenterConfig::validate() const {
  if (positions.empty()) throw DomainError("center config: no centers");
  for (const auto& p : positions) {
    for (double v : p) {
      if (!std::isfinite(v)) throw DomainError("center config: non-finite coordinate");
    }
  }
  if (t_theta) {
    if (positions.size() != 2) {
      throw DomainError("center config: non-local mode needs exactly 2 centers, got " +
                        std::to_string(positions.size()));
    }
    if (!std::isfinite(*t_theta)) throw DomainError("center config: t_theta must be finite");
    if (!alphas.empty()) throw DomainError("center config: alphas given in non-local mode");
  } else if (alphas.size() != positions.size()) {
    throw DomainError("center config: " + std::to_string(alphas.size()) + " strengths for " +
                      std::to_string(positions.size()) + " centers");
  }
  for (double a : alphas) {
    if (!std::isfinite(a)) throw DomainError("center config: non-finite strength");
  }
  for (std::size_t j = 0; j < positions.size(); ++j) {
    for (std::size_t k = j + 1; k < positions.size(); ++k) {
      if (!(distance(positions[j], positions[k]) > 0.0)) {
        throw DomainError("center config: centers " + std::to_string(j) + " and " +
                          std::to_string(k) + " coincide");
      }
    }
  }
}

GammaMatrix::GammaMatrix(std::size_t n, GammaKind kind, Complex z)
    : n_(n), kind_(kind), z_(z), entries_(n * n) {}

double GammaMatrix::scale() const {
  double s = 0.0;
  for (const auto& e : entries_) s = std::max(s, std::abs(e));
  return s;
}

namespace {

// In-place LU with partial pivoting; returns the permutation sign, or 0 when a
// pivot is exactly zero.
int lu_decompose(std::vector<Complex>& a, std::size_t n, std::vector<std::size_t>& perm) {
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    }
    if (a[p * n + c] == Complex{}) return 0;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[p * n + k], a[c * n + k]);
      std::swap(perm[p], perm[c]);
      sign = -sign;
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = a[r * n + c] / a[c * n + c];
      a[r * n + c] = f;
      for (std::size_t k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return sign;
}

}  // namespace

Complex GammaMatrix::determinant() const {
  if (n_ == 1) return entries_[0];
  if (n_ == 2) {
    const Complex& a = entries_[0];
    const Complex& b = entries_[1];
    const Complex& c = entries_[2];
    const Complex& d = entries_[3];
    // Factored form keeps accuracy when the two centers nearly merge.
    if (b == c && a == d) return (a - b) * (a + b);
    return a * d - b * c;
  }
  std::vector<Complex> lu = entries_;
  std::vector<std::size_t> perm;
  const int sign = lu_decompose(lu, n_, perm);
  if (sign == 0) return {};
  Complex det = static_cast<double>(sign);
  for (std::size_t i = 0; i < n_; ++i) det *= lu[i * n_ + i];
  return det;
}

bool GammaMatrix::is_singular() const {
  const double s = scale();
  if (s == 0.0) return true;
  const double det = std::abs(determinant());
  if (!std::isfinite(det)) return true;
  // Compare in scaled form so tiny entries cannot underflow the threshold.
  return det / std::pow(s, static_cast<double>(n_)) < 1e-12;
}

GammaMatrix GammaMatrix::inverse() const {
  if (is_singular()) {
    throw SingularMatrixError("Gamma matrix is singular at z = (" + std::to_string(z_.real()) +
                              ", " + std::to_string(z_.imag()) + ")");
  }
  GammaMatrix inv(n_, kind_, z_);
  if (n_ == 1) {
    inv(0, 0) = 1.0 / entries_[0];
    return inv;
  }
  if (n_ == 2) {
    const Complex det = determinant();
    inv(0, 0) = entries_[3] / det;
    inv(0, 1) = -entries_[1] / det;
    inv(1, 0) = -entries_[2] / det;
    inv(1, 1) = entries_[0] / det;
    return inv;
  }
  std::vector<Complex> lu = entries_;
  std::vector<std::size_t> perm;
  lu_decompose(lu, n_, perm);
  std::vector<Complex> col(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) col[i] = perm[i] == j ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) col[i] -= lu[i * n_ + k] * col[k];
    }
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) col[i] -= lu[i * n_ + k] * col[k];
      col[i] /= lu[i * n_ + i];
    }
    for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
  }
  return inv;
}

bool GammaMatrix::is_symmetric(double tol) const {
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t k = j + 1; k < n_; ++k) {
      if (std::abs((*this)(j, k) - (*this)(k, j)) > tol) return false;
    }
  }
  return true;
}

GammaMatrix gamma_local(const CenterConfig& config, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("gamma_local: lambda must be positive, got " + std::to_string(lambda));
  }
  return gamma_local_at_root(config, std::sqrt(lambda));
}

GammaMatrix gamma_local_at_root(const CenterConfig& config, double root) {
  if (!config.is_local()) throw DomainError("gamma_local: config is non-local");
  config.validate();
  if (!(root >= 0.0) || !std::isfinite(root)) {
    throw DomainError("gamma_local: sqrt(lambda) must be non-negative, got " +
                      std::to_string(root));
  }
  const std::size_t n = config.size();
  GammaMatrix g(n, GammaKind::local, Complex{-root * root, 0.0});
  for (std::size_t j = 0; j < n; ++j) {
    g(j, j) = config.alphas[j] + root / (4.0 * kPi);
    for (std::size_t k = j + 1; k < n; ++k) {
      const double r = distance(config.positions[j], config.positions[k]);
      const double off = -std::exp(-root * r) / (4.0 * kPi * r);
      g(j, k) = off;
      g(k, j) = off;
    }
  }
  return g;
}

Complex expm1_complex(Complex w) {
  const double a = w.real();
  const double b = w.imag();
  const double sh = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * sh * sh, std::exp(a) * std::sin(b)};
}

NonlocalEntries nonlocal_entries(double r, Complex q) {
  const double x = r / kSqrt2;
  NonlocalEntries e;
  e.s = 1.0 / (4.0 * kSqrt2 * kPi);
  e.big_s = std::exp(-x) * std::sin(x) / (4.0 * kPi * r);
  e.c_z = (q - kSqrtI) / (4.0 * kPi);
  // e^{-q r} - e^{-sqrt(i) r} = e^{-sqrt(i) r} (e^{-(q - sqrt(i)) r} - 1)
  e.big_c_z = -std::exp(-kSqrtI * r) * expm1_complex(-(q - kSqrtI) * r) / (4.0 * kPi * r);
  return e;
}

GammaMatrix gamma_nonlocal_at_root(double t_theta, double r, Complex q) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("gamma_nonlocal: r must be positive, got " + std::to_string(r));
  }
  if (!std::isfinite(t_theta)) throw DomainError("gamma_nonlocal: t_theta must be finite");
  if (q.real() < 0.0) throw DomainError("gamma_nonlocal: sqrt(-z) must have Re >= 0");
  const NonlocalEntries e = nonlocal_entries(r, q);
  const Complex phase{t_theta, 1.0};
  GammaMatrix g(2, GammaKind::nonlocal_symmetric, -q * q);
  const Complex diag = phase * e.s + e.c_z;
  const Complex off = phase * e.big_s + e.big_c_z;
  g(0, 0) = diag;
  g(1, 1) = diag;
  g(0, 1) = off;
  g(1, 0) = off;
  return g;
}

GammaMatrix gamma_nonlocal(double t_theta, double r, Complex z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw DomainError("gamma_nonlocal: z on the positive real axis; pass the root explicitly");
  }
  return gamma_nonlocal_at_root(t_theta, r, std::sqrt(-z));
}

Complex resolvent_coefficient_sum(const GammaMatrix& gamma) {
  if (gamma.size() == 2 && gamma(0, 0) == gamma(1, 1) && gamma(0, 1) == gamma(1, 0)) {
    if (gamma.is_singular()) {
      throw SingularMatrixError("Gamma matrix is singular; no coefficient sum");
    }
    return 2.0 / (gamma(0, 0) + gamma(0, 1));
  }
  const GammaMatrix inv = gamma.inverse();
  Complex sum{};
  for (std::size_t j = 0; j < inv.size(); ++j) {
    for (std::size_t k = 0; k < inv.size(); ++k) sum += inv(j, k);
  }
  return sum;
}

Complex two_becomes_one_limit(double t_theta, Complex z) {
  return 4.0 * kPi / (std::sqrt(-z) + (t_theta - 1.0) / kSqrt2);
}

}  // namespace pontspec
