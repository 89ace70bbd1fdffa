#pragma once

// Bound states and scattering length of the local n-center point interaction.

#include <optional>
#include <vector>

#include "pontspec/gamma_matrices.hpp"

namespace pontspec {

struct LocalSpectrum {
  std::vector<double> eigenvalues;  // E <= 0, ascending
  std::optional<double> scattering_length;
  std::optional<double> collapse_scale;  // lambda r^2 of the deepest level, pairs only
};

/// det Gamma_{alpha,y}(lambda) as a function of q = sqrt(lambda) >= 0.
double local_determinant(const CenterConfig& config, double root);

/// Number of negative eigenvalues of the real symmetric Gamma at q = sqrt(lambda).
/// Levels below -q^2 are exactly this many (with multiplicity).
int local_negative_count(const CenterConfig& config, double root);

/// An upper bound on sqrt(lambda) for every root: beyond it Gamma is strictly
/// diagonally dominant with positive diagonal.
double local_root_ceiling(const CenterConfig& config);

/// All levels with |E| <= search_ceiling, degenerate ones repeated. Roots are
/// located through drops of local_negative_count and refined by bisection.
/// A non-positive ceiling selects local_root_ceiling automatically.
LocalSpectrum local_eigenvalues(const CenterConfig& config, double search_ceiling = 0.0);

/// -(1/4pi) sum of Gamma(0)^{-1} entries. Throws SingularMatrixError at a
/// zero-energy resonance.
double local_scattering_length(const CenterConfig& config);

/// lambda r^2 of the deepest level of the symmetric pair with strength alpha,
/// one value per separation (root-found, not from the closed form).
std::vector<double> collapse_diagnostic(double alpha, const std::vector<double>& r_sequence);

/// Closed form of the same quantity: (W(e^c) - c)^2 with c = 4 pi alpha r,
/// nullopt when c >= 1 (no bound state).
std::optional<double> collapse_scale_closed_form(double alpha, double r);

/// Light-particle energy lambda(R) of the local pair over a grid of R, the
/// contrast case that collapses like 1/R^2. Entries are nullopt where no level exists.
std::vector<std::optional<double>> local_bo_instability_demo(double alpha,
                                                             const std::vector<double>& r_grid);

}  // namespace pontspec
