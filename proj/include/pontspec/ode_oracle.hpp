#pragma once

// Radial s-wave shooting for u'' = (V(r) + lambda^2) u, u(0) = 0.
//
// The grid is uniform in r from the origin to the first breakpoint and
// logarithmic beyond it, where the substitution r = e^x, u = e^{x/2} y turns an
// inverse-square tail into a constant-coefficient equation. Each segment is
// integrated with Numerov's method; segments are glued through (u, u').
// Eigenvalues are located on a glued Pruefer phase that is continuous and
// decreasing in lambda, so node labels come out of the phase directly.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "pontspec/special_fn.hpp"

namespace pontspec {

struct RadialPotential {
  std::function<double(double)> inner;  // V(r) for r < tail_start
  double tail_start = std::numeric_limits<double>::infinity();
  double tail_k = 0.0;               // V(r) = -tail_k / r^2 for r >= tail_start
  std::vector<double> breakpoints;   // where V or V' may jump (tail_start is implied)
  double v_min = std::numeric_limits<double>::quiet_NaN();  // sampled when NaN

  double operator()(double r) const;

  static RadialPotential zero();
  /// V = -depth on [0, width), 0 beyond.
  static RadialPotential square_well(double depth, double width);
  /// inner on [0, r0], -k/r^2 beyond.
  static RadialPotential piecewise(std::function<double(double)> inner, double r0, double k);
};

struct StatePoint {
  double r = 0.0;
  double u = 0.0;
  double du = 0.0;
};

struct ShootingResult {
  double lambda = 0.0;  // sqrt(-E)
  int nodes = 0;        // sign changes of u on (0, r_match)
  double log_derivative_mismatch = 0.0;  // u'/u - tail log derivative, at r_match
  double phase = 0.0;   // glued Pruefer phase; level n sits at (n-1) pi
  double tail_log_derivative = 0.0;
  double r_match = 0.0;
  double linear_step = 0.0;
  double log_step = 0.0;
  int renormalizations = 0;
  StatePoint end;
  std::vector<StatePoint> boundaries;  // state at every segment junction (u absolute)
};

/// Log-derivative u'/u of the decaying solution of u'' = (lambda^2 - k/r^2) u
/// at radius r: sqrt(r) K_nu(lambda r) with nu = sqrt(1/4 - k), real or imaginary.
double tail_log_derivative(double k, double lambda, double r);

/// Integrator bound to one potential. Potential values on the grid are cached,
/// so repeated shooting at different lambda is cheap. The cache grows on
/// demand, so one instance must not be shared between threads.
class RadialShooter {
 public:
  /// linear_step <= 0 selects r_lin / 1e4 where r_lin is the first junction.
  /// The logarithmic step scales with it (2.5e-4 at the default).
  explicit RadialShooter(RadialPotential potential, double linear_step = 0.0,
                         std::vector<double> extra_breakpoints = {});
  ~RadialShooter();
  RadialShooter(RadialShooter&&) noexcept;
  RadialShooter& operator=(RadialShooter&&) noexcept;

  /// Integrate to r_end (<= 0: automatic matching radius in the tail).
  /// u'(0) is set to initial_slope. When trace is given every grid point is
  /// appended (u values share one scale; renormalisations rescale the trace).
  ShootingResult shoot(double lambda, double r_end = 0.0, double initial_slope = 1.0,
                       std::vector<StatePoint>* trace = nullptr) const;

  /// Radius where the tail boundary condition is imposed: tail_start, pushed
  /// out to lambda r = sqrt(k) + 1 for k > 1/4 so that every zero of
  /// K_{i beta}(lambda r) is integrated through. Beyond the classical turning
  /// point the outward solution grows by at most e^2 relative to the decaying one.
  double matching_radius(double lambda) const;

  const RadialPotential& potential() const;
  double linear_step() const;
  double log_step() const;
  double min_potential() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One shot with the default grid scaled to the given linear step.
ShootingResult integrate_radial(const RadialPotential& potential, double lambda, double r_max,
                                double step = 0.0, std::vector<StatePoint>* trace = nullptr);

struct LevelSearchOptions {
  double linear_step = 0.0;  // starting step, refined by halving
  int max_refinements = 4;
  double stability = 1e-8;   // relative level change tolerated between refinements
  double bisection_tolerance = 1e-12;  // relative, in lambda
};

struct LevelSet {
  std::vector<double> energies;  // ascending (deepest first)
  std::vector<int> labels;       // level index n (node count n-1)
  std::vector<int> nodes;
  double linear_step = 0.0;
  double log_step = 0.0;
  int refinements = 0;
  double max_relative_shift = 0.0;  // last refinement
};

/// The n_max deepest levels with energies in [e_lo, e_hi] (e_lo NaN: min V).
/// Throws MissingLevelError when node counts disagree with the phase labels,
/// ConvergenceError when step halving does not settle the levels.
LevelSet find_levels(const RadialPotential& potential, int n_max,
                     double e_lo = std::numeric_limits<double>::quiet_NaN(), double e_hi = 0.0,
                     const LevelSearchOptions& options = {});

/// Same search on an existing shooter (single grid, no refinement).
LevelSet find_levels_on_grid(const RadialShooter& shooter, int n_max, double e_lo, double e_hi,
                             double bisection_tolerance = 1e-12);

struct LemmaCheck {
  bool passed = false;
  bool energy_bound_u = false;   // u^2(r0) <= Q r0^2 / (k - r0^2 lambda^2)
  bool energy_bound_du = false;  // u'^2(r0) <= Q
  bool origin_bound_u = false;   // |u(r_min)| <= A lambda r_min
  bool origin_bound_du = false;  // |u'(r_min)| <= A lambda
  double q = 0.0;                // u'^2(r~) - (V0(r~) + lambda^2) u^2(r~)
  StatePoint at_tilde_r;
  StatePoint at_r0;
  double bound_u2 = 0.0;
  double bound_du2 = 0.0;
  double slack = 0.0;  // relative allowance for the O(lambda^2) terms
};

/// Integrates u(0) = 0, u'(0) = A lambda for the piecewise potential (inner
/// on [0, r0], r0 = tail_start, k = tail_k) and checks the energy bounds
/// between tilde_r and r0 plus the origin bounds at tilde_r. Throws
/// PreconditionError when the hypotheses fail: lambda r0 >= sqrt(k), V0
/// decreasing somewhere on [tilde_r, r0] or |V0| < k/r0^2 there.
LemmaCheck lemma_bounds_check(const RadialPotential& potential, double lambda, double tilde_r,
                              double amplitude = 1.0);

}  // namespace pontspec
