#include "pontspec/ode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pontspec/errors.hpp"

namespace pontspec {

namespace {

constexpr double kRenormThreshold = 1e200;
constexpr double kRenormFactor = 1e-200;
constexpr int kStartMicroSteps = 16;
constexpr double kDefaultLinearPoints = 1e4;
constexpr double kDefaultLogStep = 2.5e-4;

struct Segment {
  bool log = false;
  bool open = false;  // last segment, extended on demand
  double a = 0.0;     // start coordinate (r or x = ln r)
  double b = 0.0;     // end coordinate (fixed segments)
  double h = 0.0;
  int n = 0;          // number of steps (fixed segments)
  std::vector<double> v;  // cached V at grid points
};

double coordinate_to_r(const Segment& s, double c) { return s.log ? std::exp(c) : c; }

double real_order_log_derivative(double nu, double tau) {
  if (tau > 500.0) {
    // Hankel expansion of K_nu, three terms.
    const double mu = 4.0 * nu * nu;
    const double a1 = (mu - 1.0) / 8.0;
    const double a2 = (mu - 1.0) * (mu - 9.0) / 128.0;
    const double s = 1.0 + a1 / tau + a2 / (tau * tau);
    return -1.0 - 0.5 / tau + (-a1 / (tau * tau) - 2.0 * a2 / (tau * tau * tau)) / s;
  }
  const double k = std::cyl_bessel_k(nu, tau);
  const double km = std::cyl_bessel_k(std::abs(nu - 1.0), tau);
  const double kp = std::cyl_bessel_k(nu + 1.0, tau);
  return -0.5 * (km + kp) / k;
}

}  // namespace

double RadialPotential::operator()(double r) const {
  if (r >= tail_start) return -tail_k / (r * r);
  return inner ? inner(r) : 0.0;
}

RadialPotential RadialPotential::zero() {
  RadialPotential p;
  p.inner = [](double) { return 0.0; };
  p.v_min = 0.0;
  return p;
}

RadialPotential RadialPotential::square_well(double depth, double width) {
  if (!(width > 0.0)) throw DomainError("square_well: width must be positive");
  RadialPotential p;
  p.inner = [depth](double) { return -depth; };
  p.tail_start = width;
  p.tail_k = 0.0;
  p.v_min = std::min(-depth, 0.0);
  return p;
}

RadialPotential RadialPotential::piecewise(std::function<double(double)> inner, double r0,
                                           double k) {
  if (!(r0 > 0.0)) throw DomainError("piecewise potential: r0 must be positive");
  RadialPotential p;
  p.inner = std::move(inner);
  p.tail_start = r0;
  p.tail_k = k;
  return p;
}

double tail_log_derivative(double k, double lambda, double r) {
  if (!(lambda > 0.0) || !(r > 0.0)) {
    throw DomainError("tail_log_derivative: lambda and r must be positive");
  }
  const double tau = lambda * r;
  if (k == 0.0) return -lambda;
  if (k > 0.25) {
    const BesselKImagOrder bessel(std::sqrt(k - 0.25));
    return 0.5 / r + lambda * bessel.log_derivative(tau);
  }
  return 0.5 / r + lambda * real_order_log_derivative(std::sqrt(0.25 - k), tau);
}

struct RadialShooter::Impl {
  RadialPotential pot;
  std::vector<Segment> segments;
  double linear_step = 0.0;
  double log_step = 0.0;
  double v_min = 0.0;
  std::optional<BesselKImagOrder> bessel;  // tail with k > 1/4

  double v_at(const Segment& s, int j) const {
    const double c = s.a + j * s.h;
    double r = coordinate_to_r(s, c);
    // Endpoint values belong to the segment's own side of a junction.
    if (j == 0 && r > 0.0) r = std::nextafter(coordinate_to_r(s, s.a), HUGE_VAL);
    if (!s.open && j == s.n) r = std::nextafter(coordinate_to_r(s, s.b), 0.0);
    return pot(r);
  }

  void fill(Segment& s, int upto) const {
    if (static_cast<int>(s.v.size()) > upto) return;
    const int from = static_cast<int>(s.v.size());
    s.v.resize(static_cast<std::size_t>(upto) + 1);
    for (int j = from; j <= upto; ++j) s.v[static_cast<std::size_t>(j)] = v_at(s, j);
  }

  double tail_log_derivative_at(double lambda, double r) const {
    if (bessel) return 0.5 / r + lambda * bessel->log_derivative(lambda * r);
    return tail_log_derivative(pot.tail_k, lambda, r);
  }
};

RadialShooter::RadialShooter(RadialPotential potential, double linear_step,
                             std::vector<double> extra_breakpoints)
    : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.pot = std::move(potential);
  if (!im.pot.inner) im.pot.inner = [](double) { return 0.0; };

  std::vector<double> junctions = im.pot.breakpoints;
  junctions.insert(junctions.end(), extra_breakpoints.begin(), extra_breakpoints.end());
  if (std::isfinite(im.pot.tail_start)) junctions.push_back(im.pot.tail_start);
  junctions.erase(std::remove_if(junctions.begin(), junctions.end(),
                                 [](double r) { return !(r > 0.0) || !std::isfinite(r); }),
                  junctions.end());
  std::sort(junctions.begin(), junctions.end());
  junctions.erase(std::unique(junctions.begin(), junctions.end()), junctions.end());

  if (junctions.empty()) {
    if (!(linear_step > 0.0)) {
      throw PreconditionError("radial shooter: a potential without junctions needs an explicit step");
    }
    im.linear_step = linear_step;
    Segment s;
    s.open = true;
    s.h = linear_step;
    im.segments.push_back(std::move(s));
  } else {
    const double r_lin = junctions.front();
    im.linear_step = linear_step > 0.0 ? linear_step : r_lin / kDefaultLinearPoints;
    im.log_step = kDefaultLogStep * (im.linear_step * kDefaultLinearPoints / r_lin);

    Segment first;
    first.b = r_lin;
    first.n = std::max(4, static_cast<int>(std::ceil(r_lin / im.linear_step - 1e-9)));
    first.h = r_lin / first.n;
    im.segments.push_back(std::move(first));
    for (std::size_t i = 0; i + 1 < junctions.size(); ++i) {
      Segment s;
      s.log = true;
      s.a = std::log(junctions[i]);
      s.b = std::log(junctions[i + 1]);
      s.n = std::max(4, static_cast<int>(std::ceil((s.b - s.a) / im.log_step - 1e-9)));
      s.h = (s.b - s.a) / s.n;
      im.segments.push_back(std::move(s));
    }
    Segment last;
    last.log = true;
    last.open = true;
    last.a = std::log(junctions.back());
    last.h = im.log_step;
    im.segments.push_back(std::move(last));
  }

  for (auto& s : im.segments) {
    if (!s.open) im.fill(s, s.n);
  }

  if (std::isnan(im.pot.v_min)) {
    double vmin = 0.0;
    for (const auto& s : im.segments) {
      for (double v : s.v) vmin = std::min(vmin, v);
    }
    if (std::isfinite(im.pot.tail_start)) {
      vmin = std::min(vmin, im.pot(im.pot.tail_start));
    }
    im.v_min = vmin;
  } else {
    im.v_min = im.pot.v_min;
  }
  if (std::isfinite(im.pot.tail_start) && im.pot.tail_k > 0.25) {
    im.bessel.emplace(std::sqrt(im.pot.tail_k - 0.25));
  }
}

RadialShooter::~RadialShooter() = default;
RadialShooter::RadialShooter(RadialShooter&&) noexcept = default;
RadialShooter& RadialShooter::operator=(RadialShooter&&) noexcept = default;

const RadialPotential& RadialShooter::potential() const { return impl_->pot; }
double RadialShooter::linear_step() const { return impl_->linear_step; }
double RadialShooter::log_step() const { return impl_->log_step; }
double RadialShooter::min_potential() const { return impl_->v_min; }

double RadialShooter::matching_radius(double lambda) const {
  const RadialPotential& p = impl_->pot;
  if (!std::isfinite(p.tail_start)) return std::numeric_limits<double>::quiet_NaN();
  if (!(p.tail_k > 0.25)) return p.tail_start;
  return std::max(p.tail_start, (std::sqrt(p.tail_k) + 1.0) / lambda);
}

ShootingResult RadialShooter::shoot(double lambda, double r_end, double initial_slope,
                                    std::vector<StatePoint>* trace) const {
  Impl& im = *impl_;
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("shoot: lambda must be non-negative and finite");
  }
  if (!(r_end > 0.0)) {
    if (!(lambda > 0.0)) throw DomainError("shoot: automatic matching radius needs lambda > 0");
    r_end = matching_radius(lambda);
    if (!std::isfinite(r_end)) {
      throw PreconditionError("shoot: no tail declared, an explicit r_end is required");
    }
  }
  const double lambda2 = lambda * lambda;

  ShootingResult res;
  res.lambda = lambda;
  res.linear_step = im.linear_step;
  res.log_step = im.log_step;

  int last_sign = 0;
  int renorms = 0;
  double u_prev_end = 0.0;
  double du_prev_end = 0.0;
  const double abs_scale_step = 1.0 / kRenormFactor;

  for (std::size_t si = 0; si < im.segments.size(); ++si) {
    Segment& seg = im.segments[si];
    const double r_a = coordinate_to_r(seg, seg.a);
    const double end_coord = seg.log ? std::log(r_end) : r_end;
    bool final = true;
    int n;
    // Grid nodes up to r_end; the remainder is closed with an RK4 step below.
    auto steps_to_end = [&]() {
      return std::max(2, static_cast<int>(std::floor((end_coord - seg.a) / seg.h + 1e-9)));
    };
    if (seg.open) {
      n = steps_to_end();
    } else {
      const double tol = 1e-12 * std::max(1.0, std::abs(seg.b));
      if (end_coord > seg.b + tol) {
        n = seg.n;
        final = false;
      } else if (end_coord >= seg.b - tol) {
        n = seg.n;
      } else {
        n = std::min(seg.n, steps_to_end());
      }
    }
    if (seg.open) im.fill(seg, n);
    const double h = seg.h;
    const double h2 = h * h;

    auto g_of = [&](int j) {
      const double v = seg.v[static_cast<std::size_t>(j)];
      if (!seg.log) return v + lambda2;
      const double r = std::exp(seg.a + j * h);
      return r * r * (v + lambda2) + 0.25;
    };
    auto check_step = [&](double g, int j) {
      if (h2 * std::abs(g) >= 0.1) {
        throw PreconditionError("shoot: step too coarse (h^2 |g| = " + std::to_string(h2 * std::abs(g)) +
                                ") at r = " + std::to_string(coordinate_to_r(seg, seg.a + j * h)));
      }
    };

    // Two starting values: (y, y') at the segment start, then a short RK4
    // run to the first node.
    auto rk4 = [&](auto&& gfun, double c, double span, double& y, double& yx) {
      const double dh = span / kStartMicroSteps;
      for (int m = 0; m < kStartMicroSteps; ++m) {
        const double g1 = gfun(c, m == 0);
        const double gm = gfun(c + 0.5 * dh, false);
        const double g2 = gfun(c + dh, false);
        const double k1y = yx, k1v = g1 * y;
        const double k2y = yx + 0.5 * dh * k1v, k2v = gm * (y + 0.5 * dh * k1y);
        const double k3y = yx + 0.5 * dh * k2v, k3v = gm * (y + 0.5 * dh * k2y);
        const double k4y = yx + dh * k3v, k4v = g2 * (y + dh * k3y);
        y += dh * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0;
        yx += dh * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0;
        c += dh;
      }
    };
    auto rk4_start = [&](auto&& gfun, double y, double yx) {
      rk4(gfun, seg.a, h, y, yx);
      return y;
    };
    auto g_lin = [&](double r, bool) { return im.pot(r) + lambda2; };
    auto g_log = [&](double x, bool) {
      const double r = std::exp(x);
      return r * r * (im.pot(r) + lambda2) + 0.25;
    };
    double y0;
    double y1;
    if (si == 0) {
      y0 = 0.0;
      y1 = rk4_start(g_lin, 0.0, initial_slope);
    } else {
      // (u, u') -> (y, y_x) at r_a.
      const double sr = std::sqrt(r_a);
      const double y = u_prev_end / sr;
      const double yx = sr * du_prev_end - 0.5 * y;
      y0 = y;
      y1 = rk4_start(
          [&](double x, bool at_start) {
            const double r = std::exp(x);
            const double rr = at_start ? std::nextafter(r_a, HUGE_VAL) : r;
            return r * r * (im.pot(rr) + lambda2) + 0.25;
          },
          y, yx);
    }

    auto to_u = [&](int j, double y) {
      if (!seg.log) return y;
      return std::sqrt(std::exp(seg.a + j * h)) * y;
    };
    auto note_sign = [&](double y) {
      if (y > 0.0) {
        if (last_sign < 0) ++res.nodes;
        last_sign = 1;
      } else if (y < 0.0) {
        if (last_sign > 0) ++res.nodes;
        last_sign = -1;
      }
    };

    const double g0 = g_of(0);
    const double g1 = g_of(1);
    check_step(g0, 0);
    check_step(g1, 1);
    if (trace) {
      if (si == 0) trace->push_back({0.0, 0.0, 0.0});
      trace->push_back({coordinate_to_r(seg, seg.a + h), to_u(1, y1), 0.0});
    }
    note_sign(y0);
    note_sign(y1);
    double y_jm1 = y0, y_j = y1, g_jm1 = g0, g_j = g1;
    double y_jm2 = 0.0, g_jm2 = 0.0;
    // Summed form: z = (1 - h^2 g/12) y, z_{j+1} - z_j = (z_j - z_{j-1}) + h^2 g_j y_j.
    // Carrying the first difference keeps roundoff growth linear in the step count.
    double z_j = (1.0 - h2 * g1 / 12.0) * y1;
    double dz = z_j - (1.0 - h2 * g0 / 12.0) * y0;
    for (int j = 1; j < n; ++j) {
      const double g_jp1 = g_of(j + 1);
      check_step(g_jp1, j + 1);
      dz += h2 * g_j * y_j;
      z_j += dz;
      const double y_jp1 = z_j / (1.0 - h2 * g_jp1 / 12.0);
      y_jm2 = y_jm1;
      g_jm2 = g_jm1;
      y_jm1 = y_j;
      g_jm1 = g_j;
      y_j = y_jp1;
      g_j = g_jp1;
      note_sign(y_j);
      if (trace) trace->push_back({coordinate_to_r(seg, seg.a + (j + 1) * h), to_u(j + 1, y_j), 0.0});
      if (std::abs(y_j) > kRenormThreshold) {
        y_j *= kRenormFactor;
        y_jm1 *= kRenormFactor;
        y_jm2 *= kRenormFactor;
        z_j *= kRenormFactor;
        dz *= kRenormFactor;
        ++renorms;
        if (trace) {
          for (auto& p : *trace) p.u *= kRenormFactor;
        }
      }
    }
    // Derivative at the last node: Numerov-consistent central difference one
    // node in, then a three-point Adams-Moulton step.
    double yd_nm1;
    if (n >= 2) {
      yd_nm1 = ((y_j - h2 * g_j * y_j / 6.0) - (y_jm2 - h2 * g_jm2 * y_jm2 / 6.0)) / (2.0 * h);
      const double f2 = g_jm2 * y_jm2, f1 = g_jm1 * y_jm1, f0 = g_j * y_j;
      yd_nm1 += h * (-f2 + 8.0 * f1 + 5.0 * f0) / 12.0;
    } else {
      yd_nm1 = (y_j - y_jm1) / h;
    }
    double c_end = seg.a + n * h;
    bool landed = false;
    if (final && !(!seg.open && n == seg.n)) {
      const double rest = end_coord - c_end;
      if (std::abs(rest) > 1e-12 * std::max(1.0, std::abs(end_coord))) {
        if (seg.log) {
          rk4(g_log, c_end, rest, y_j, yd_nm1);
        } else {
          rk4(g_lin, c_end, rest, y_j, yd_nm1);
        }
        note_sign(y_j);
        c_end = end_coord;
        landed = true;
        if (trace) {
          const double rr = r_end;
          trace->push_back({rr, seg.log ? std::sqrt(rr) * y_j : y_j, 0.0});
        }
      }
    }
    const double r_n = landed ? r_end : coordinate_to_r(seg, c_end);
    double u_end;
    double du_end;
    if (seg.log) {
      const double sr = std::sqrt(r_n);
      u_end = sr * y_j;
      du_end = (yd_nm1 + 0.5 * y_j) / sr;
    } else {
      u_end = y_j;
      du_end = yd_nm1;
    }
    u_prev_end = u_end;
    du_prev_end = du_end;
    const double abs_factor = std::pow(abs_scale_step, renorms);
    res.boundaries.push_back({r_n, u_end * abs_factor, du_end * abs_factor});
    if (final) {
      res.end = {r_n, u_end, du_end};
      res.r_match = r_n;
      break;
    }
  }
  res.renormalizations = renorms;

  const RadialPotential& p = im.pot;
  if (lambda > 0.0 && std::isfinite(p.tail_start) && res.r_match >= p.tail_start) {
    const double l_tail = im.tail_log_derivative_at(lambda, res.r_match);
    res.tail_log_derivative = l_tail;
    res.log_derivative_mismatch = res.end.du / res.end.u - l_tail;
    double sigma = res.end.u > 0.0 ? 1.0 : (res.end.u < 0.0 ? -1.0 : 0.0);
    if (sigma == 0.0) sigma = last_sign >= 0 ? 1.0 : -1.0;
    res.phase = res.nodes * kPi + std::atan2(sigma * res.end.u, sigma * res.end.du / lambda) -
                std::atan2(1.0, l_tail / lambda);
  } else {
    res.tail_log_derivative = std::numeric_limits<double>::quiet_NaN();
    res.log_derivative_mismatch = std::numeric_limits<double>::quiet_NaN();
    res.phase = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

ShootingResult integrate_radial(const RadialPotential& potential, double lambda, double r_max,
                                double step, std::vector<StatePoint>* trace) {
  if (!(r_max > 0.0)) throw DomainError("integrate_radial: r_max must be positive");
  if (!(step > 0.0)) {
    const double first = std::isfinite(potential.tail_start) ? potential.tail_start : r_max;
    double r_lin = first;
    for (double b : potential.breakpoints) {
      if (b > 0.0) r_lin = std::min(r_lin, b);
    }
    step = r_lin / kDefaultLinearPoints;
  }
  const RadialShooter shooter(potential, step);
  return shooter.shoot(lambda, r_max, 1.0, trace);
}

LevelSet find_levels_on_grid(const RadialShooter& shooter, int n_max, double e_lo, double e_hi,
                             double bisection_tolerance) {
  LevelSet out;
  out.linear_step = shooter.linear_step();
  out.log_step = shooter.log_step();
  if (n_max <= 0) return out;
  const RadialPotential& pot = shooter.potential();
  if (!std::isfinite(pot.tail_start)) {
    throw PreconditionError("find_levels: the potential needs a declared tail");
  }
  if (std::isnan(e_lo)) e_lo = shooter.min_potential();
  e_hi = std::min(e_hi, 0.0);
  if (!(e_lo < e_hi)) return out;

  const double kappa_max = std::sqrt(-e_lo);
  double kappa_min = std::sqrt(-e_hi);
  // Sub-critical tails carry finitely many levels; stop the scan far below
  // the deepest scale instead of running into kappa = 0.
  if (kappa_min == 0.0) kappa_min = kappa_max * (pot.tail_k > 0.25 ? 1e-150 : 1e-8);

  double factor = 1.25;
  if (pot.tail_k > 0.25) factor = std::min(factor, std::exp(kPi / (4.0 * std::sqrt(pot.tail_k - 0.25))));

  auto phase = [&](double kappa) { return shooter.shoot(kappa).phase; };

  double k_prev = kappa_max;
  double f_prev = phase(k_prev);
  int label = static_cast<int>(std::floor(f_prev / kPi)) + 2;
  while (static_cast<int>(out.energies.size()) < n_max && k_prev > kappa_min) {
    const double k_next = std::max(k_prev / factor, kappa_min);
    const double f_next = phase(k_next);
    while (static_cast<int>(out.energies.size()) < n_max && f_next >= (label - 1) * kPi) {
      const double target = (label - 1) * kPi;
      double lo = k_next;  // phase >= target
      double hi = k_prev;  // phase < target
      for (int it = 0; it < 200 && hi - lo > bisection_tolerance * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phase(mid) >= target) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double kappa = 0.5 * (lo + hi);
      // The bracket end above the level has its Pruefer angle short of the
      // next multiple of pi; near the midpoint a far matching radius can
      // carry a spurious trailing node.
      const ShootingResult at = shooter.shoot(hi);
      if (at.nodes != label - 1) {
        throw MissingLevelError("find_levels: level " + std::to_string(label) + " has " +
                                std::to_string(at.nodes) + " nodes; grid too coarse");
      }
      out.energies.push_back(-kappa * kappa);
      out.labels.push_back(label);
      out.nodes.push_back(at.nodes);
      ++label;
    }
    k_prev = k_next;
    f_prev = f_next;
  }
  return out;
}

LevelSet find_levels(const RadialPotential& potential, int n_max, double e_lo, double e_hi,
                     const LevelSearchOptions& options) {
  RadialShooter coarse(potential, options.linear_step);
  LevelSet prev = find_levels_on_grid(coarse, n_max, e_lo, e_hi, options.bisection_tolerance);
  if (prev.energies.empty()) return prev;
  double step = coarse.linear_step();
  for (int refinement = 1; refinement <= options.max_refinements; ++refinement) {
    step *= 0.5;
    const RadialShooter fine(potential, step);
    LevelSet next = find_levels_on_grid(fine, n_max, e_lo, e_hi, options.bisection_tolerance);
    double shift = 0.0;
    for (std::size_t i = 0; i < next.energies.size(); ++i) {
      for (std::size_t j = 0; j < prev.energies.size(); ++j) {
        if (prev.labels[j] == next.labels[i]) {
          shift = std::max(shift, std::abs(next.energies[i] / prev.energies[j] - 1.0));
        }
      }
    }
    next.refinements = refinement;
    next.max_relative_shift = shift;
    if (shift <= options.stability) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("find_levels: levels still moving by " +
                         std::to_string(prev.max_relative_shift) + " after " +
                         std::to_string(options.max_refinements) + " step halvings");
}

LemmaCheck lemma_bounds_check(const RadialPotential& potential, double lambda, double tilde_r,
                              double amplitude) {
  const double r0 = potential.tail_start;
  const double k = potential.tail_k;
  if (!std::isfinite(r0) || !(k > 0.0)) {
    throw PreconditionError("lemma check: potential must have an inverse-square tail beyond r0");
  }
  if (!(lambda > 0.0) || !(lambda * r0 < std::sqrt(k))) {
    throw PreconditionError("lemma check: need 0 < lambda r0 < sqrt(k), got lambda r0 = " +
                            std::to_string(lambda * r0));
  }
  if (!(tilde_r > 0.0 && tilde_r < r0)) {
    throw PreconditionError("lemma check: tilde_r must lie in (0, r0)");
  }
  const auto& v0 = potential.inner;
  const double floor = k / (r0 * r0) * (1.0 - 1e-12);
  constexpr int kSamples = 2000;
  double prev = v0(tilde_r);
  double vmax = std::abs(prev);
  for (int i = 0; i <= kSamples; ++i) {
    double r = tilde_r + (r0 - tilde_r) * i / kSamples;
    if (i == kSamples) r = std::nextafter(r0, 0.0);
    const double v = v0(r);
    vmax = std::max(vmax, std::abs(v));
    if (std::abs(v) < floor) {
      throw PreconditionError("lemma check: |V0(" + std::to_string(r) + ")| = " +
                              std::to_string(std::abs(v)) + " < k/r0^2 = " +
                              std::to_string(k / (r0 * r0)));
    }
    if (v < prev - 1e-12 * vmax) {
      throw PreconditionError("lemma check: V0 decreases near r = " + std::to_string(r));
    }
    prev = v;
  }

  const RadialShooter shooter(potential, 0.0, {tilde_r});
  const ShootingResult res = shooter.shoot(lambda, r0, amplitude * lambda);
  LemmaCheck out;
  out.at_tilde_r = res.boundaries.front();
  out.at_r0 = res.boundaries.back();
  const double u1 = out.at_tilde_r.u;
  const double du1 = out.at_tilde_r.du;
  out.q = du1 * du1 - (v0(tilde_r) + lambda * lambda) * u1 * u1;
  out.bound_u2 = out.q * r0 * r0 / (k - r0 * r0 * lambda * lambda);
  out.bound_du2 = out.q;
  // The energy bounds are exact inequalities; allow integration error only.
  constexpr double kIntegration = 1e-9;
  out.energy_bound_u = out.at_r0.u * out.at_r0.u <= out.bound_u2 * (1.0 + kIntegration);
  out.energy_bound_du = out.at_r0.du * out.at_r0.du <= out.bound_du2 * (1.0 + kIntegration);
  out.slack = lambda * lambda;
  const double a_l = std::abs(amplitude) * lambda;
  out.origin_bound_u = std::abs(u1) <= a_l * tilde_r * (1.0 + out.slack + kIntegration);
  out.origin_bound_du = std::abs(du1) <= a_l * (1.0 + out.slack + kIntegration);
  out.passed = out.energy_bound_u && out.energy_bound_du && out.origin_bound_u && out.origin_bound_du;
  return out;
}

}  // namespace pontspec
