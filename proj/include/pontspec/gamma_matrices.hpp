#pragma once

// Gamma matrices of multi-center point interactions. Eigenvalues (and
// resonances) sit at the zeros of det Gamma; the inverse weights the
// rank-n correction in the resolvent.

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace pontspec {

using Vec3 = std::array<double, 3>;
using Complex = std::complex<double>;

double distance(const Vec3& a, const Vec3& b);

/// Free Green's function e^{-sqrt(lambda) r} / (4 pi r); DomainError unless r > 0, lambda >= 0.
double green_function(double lambda, double r);

struct CenterConfig {
  std::vector<Vec3> positions;
  std::vector<double> alphas;     // local family: one strength per center
  std::optional<double> t_theta;  // non-local symmetric two-center family

  static CenterConfig local(std::vector<Vec3> positions, std::vector<double> alphas);
  /// Two centers at distance r on the z axis, both with strength alpha.
  static CenterConfig symmetric_pair(double alpha, double r);
  static CenterConfig nonlocal(double t_theta, double r);

  bool is_local() const { return !t_theta.has_value(); }
  std::size_t size() const { return positions.size(); }
  /// Throws DomainError on malformed data (length mismatch, coincident centers, ...).
  void validate() const;
};

enum class GammaKind { local, nonlocal_symmetric };

class GammaMatrix {
 public:
  GammaMatrix(std::size_t n, GammaKind kind, Complex z);

  std::size_t size() const { return n_; }
  GammaKind kind() const { return kind_; }
  /// Spectral parameter z; for real lambda constructions z = -lambda.
  Complex spectral_parameter() const { return z_; }

  Complex& operator()(std::size_t j, std::size_t k) { return entries_[j * n_ + k]; }
  const Complex& operator()(std::size_t j, std::size_t k) const { return entries_[j * n_ + k]; }

  /// Largest entry magnitude.
  double scale() const;
  Complex determinant() const;
  /// |det| < 1e-12 * scale^n.
  bool is_singular() const;
  /// Throws SingularMatrixError when is_singular().
  GammaMatrix inverse() const;
  bool is_symmetric(double tol = 0.0) const;

 private:
  std::size_t n_;
  GammaKind kind_;
  Complex z_;
  std::vector<Complex> entries_;
};

/// (alpha_j + sqrt(lambda)/4pi) delta_jk - G^lambda(|y_j - y_k|) (1 - delta_jk).
GammaMatrix gamma_local(const CenterConfig& config, double lambda);

/// Same, parametrised by sqrt(lambda) >= 0; zero gives Gamma(0).
GammaMatrix gamma_local_at_root(const CenterConfig& config, double root);

/// Non-local symmetric two-center matrix at complex z, principal root
/// Re sqrt(-z) >= 0. Rejects z on the closed positive real axis; use
/// gamma_nonlocal_at_root for boundary values there.
GammaMatrix gamma_nonlocal(double t_theta, double r, Complex z);

/// Same matrix parametrised by the root q = sqrt(-z) directly. For z = k^2 + i0
/// pass q = -i k.
GammaMatrix gamma_nonlocal_at_root(double t_theta, double r, Complex q);

/// Building blocks of the non-local matrix.
struct NonlocalEntries {
  Complex s;        // 1/(4 sqrt2 pi)
  Complex big_s;    // e^{-r/sqrt2} sin(r/sqrt2) / (4 pi r)
  Complex c_z;      // (sqrt(-z) - sqrt(i)) / 4pi
  Complex big_c_z;  // -(e^{-sqrt(-z) r} - e^{-sqrt(i) r}) / (4 pi r)
};
NonlocalEntries nonlocal_entries(double r, Complex q);

/// exp(w) - 1 without cancellation for small |w|.
Complex expm1_complex(Complex w);

/// Sum over all entries of Gamma^{-1}. Throws SingularMatrixError at a zero
/// of det Gamma.
Complex resolvent_coefficient_sum(const GammaMatrix& gamma);

/// r -> 0 limit of the non-local coefficient sum: 4 pi / (sqrt(-z) + (t-1)/sqrt2).
Complex two_becomes_one_limit(double t_theta, Complex z);

}  // namespace pontspec
