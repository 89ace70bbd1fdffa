#include "pontspec/local_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pontspec/errors.hpp"
#include "pontspec/special_fn.hpp"

namespace pontspec {

namespace {

constexpr int kScanPanels = 10000;

// Eigenvalues of a real symmetric matrix (row-major), cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += at(i, j) * at(i, j);
        if (i != j) off += at(i, j) * at(i, j);
      }
    }
    if (off <= 1e-32 * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (at(p, q) == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - sn * akq;
          at(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - sn * aqk;
          at(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  return ev;
}

double bisect_root(const CenterConfig& config, double lo, double hi, double f_lo) {
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = local_determinant(config, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double local_determinant(const CenterConfig& config, double root) {
  return gamma_local_at_root(config, root).determinant().real();
}

int local_negative_count(const CenterConfig& config, double root) {
  const GammaMatrix g = gamma_local_at_root(config, root);
  const std::size_t n = g.size();
  std::vector<double> a(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) a[j * n + k] = g(j, k).real();
  }
  const std::vector<double> ev = symmetric_eigenvalues(std::move(a), n);
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [](double v) { return v < 0.0; }));
}

double local_root_ceiling(const CenterConfig& config) {
  if (!config.is_local()) throw DomainError("local_root_ceiling: config is non-local");
  config.validate();
  double bound = 0.0;
  for (std::size_t j = 0; j < config.size(); ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < config.size(); ++k) {
      if (k != j) row += 1.0 / (4.0 * kPi * distance(config.positions[j], config.positions[k]));
    }
    bound = std::max(bound, 4.0 * kPi * (row - config.alphas[j]));
  }
  return 1.25 * bound + 1.0;
}

LocalSpectrum local_eigenvalues(const CenterConfig& config, double search_ceiling) {
  if (!config.is_local()) throw DomainError("local_eigenvalues: config is non-local");
  config.validate();
  if (!std::isfinite(search_ceiling)) {
    throw DomainError("local_eigenvalues: search ceiling must be finite");
  }
  const double q_max =
      search_ceiling > 0.0 ? std::sqrt(search_ceiling) : local_root_ceiling(config);

  // Every eigenvalue of Gamma increases with lambda, so each level is a drop
  // in the number of negative eigenvalues; degenerate levels drop it by more
  // than one without a sign change of det Gamma.
  LocalSpectrum out;
  const double h = q_max / kScanPanels;
  double q_prev = 0.0;
  int n_prev = local_negative_count(config, 0.0);
  for (int i = 1; i <= kScanPanels && n_prev > 0; ++i) {
    const double q = i * h;
    const int n_here = local_negative_count(config, q);
    if (n_here < n_prev) {
      const double f_lo = local_determinant(config, q_prev);
      if (n_prev - n_here == 1 && f_lo != 0.0) {
        const double root = bisect_root(config, q_prev, q, f_lo);
        out.eigenvalues.push_back(-root * root);
      } else {
        for (int j = 1; j <= n_prev - n_here; ++j) {
          double lo = q_prev;
          double hi = q;
          for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (local_negative_count(config, mid) > n_prev - j) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
          const double root = 0.5 * (lo + hi);
          out.eigenvalues.push_back(-root * root);
        }
      }
    }
    q_prev = q;
    n_prev = n_here;
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  if (config.size() == 2 && !out.eigenvalues.empty()) {
    const double r = distance(config.positions[0], config.positions[1]);
    out.collapse_scale = -out.eigenvalues.front() * r * r;
  }
  if (config.size() == 2) {
    try {
      out.scattering_length = local_scattering_length(config);
    } catch (const SingularMatrixError&) {
      // zero-energy resonance: leave empty
    }
  }
  return out;
}

double local_scattering_length(const CenterConfig& config) {
  if (!config.is_local()) throw DomainError("local_scattering_length: config is non-local");
  const GammaMatrix g0 = gamma_local_at_root(config, 0.0);
  return -resolvent_coefficient_sum(g0).real() / (4.0 * kPi);
}

std::vector<double> collapse_diagnostic(double alpha, const std::vector<double>& r_sequence) {
  std::vector<double> out;
  out.reserve(r_sequence.size());
  for (double r : r_sequence) {
    if (!(r > 0.0)) {
      throw DomainError("collapse_diagnostic: separations must be positive, got " +
                        std::to_string(r));
    }
    const LocalSpectrum s = local_eigenvalues(CenterConfig::symmetric_pair(alpha, r));
    out.push_back(s.collapse_scale.value_or(std::nan("")));
  }
  return out;
}

std::optional<double> collapse_scale_closed_form(double alpha, double r) {
  const double c = 4.0 * kPi * alpha * r;
  if (!(c < 1.0)) return std::nullopt;
  const double s = lambert_w0_value(std::exp(c)) - c;
  return s * s;
}

std::vector<std::optional<double>> local_bo_instability_demo(double alpha,
                                                             const std::vector<double>& r_grid) {
  std::vector<std::optional<double>> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    const std::vector<double> scale = collapse_diagnostic(alpha, {r});
    if (std::isnan(scale[0])) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(scale[0] / (r * r));
    }
  }
  return out;
}

}  // namespace pontspec
