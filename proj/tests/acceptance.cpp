// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pontspec/born_oppenheimer.hpp"
#include "pontspec/efimov.hpp"
#include "pontspec/gamma_matrices.hpp"
#include "pontspec/local_spectrum.hpp"
#include "pontspec/special_fn.hpp"
#include "pontspec/two_center.hpp"

using namespace pontspec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

const double kW2 = omega_constant() * omega_constant();

Outcome lambert_identity() {
  double worst = 0.0;
  for (double r : {0.1, 1.0, 10.0}) {
    const LocalSpectrum s = local_eigenvalues(CenterConfig::symmetric_pair(0.0, r));
    if (s.eigenvalues.empty()) return {false, fmt("no level at r = %g", r)};
    worst = std::max(worst, std::abs(-s.eigenvalues.front() * r * r - kW2) / kW2);
  }
  return {worst <= 1e-10, fmt("max rel dev of lambda r^2 from W(1)^2 = %.3e", worst)};
}

Outcome small_r_law() {
  const double r = 1e-3;
  const double q = epsilon0(TwoCenterParams{1.0, r}).value / (-r * r / 16.0);
  return {q >= 0.99 && q <= 1.01, fmt("eps0/(-r^2/16) = %.12f", q)};
}

Outcome exact_nodes() {
  double worst = 0.0;
  for (int m = 0; m <= 2; ++m) {
    const double rm = node_radius(m);
    worst = std::max(worst, rel(epsilon0(TwoCenterParams{1.0, rm}).value, -kW2 / (rm * rm)));
  }
  return {worst <= 1e-12, fmt("max rel dev at R_0..R_2 = %.3e", worst)};
}

Outcome plateau() {
  const double a = epsilon0(TwoCenterParams{0.0, 1e-6}).value;
  const double b = epsilon0(TwoCenterParams{0.0, 100.0}).value;
  const bool ok = rel(a, -0.5) <= 1e-3 && rel(b, -0.5) <= 1e-3;
  return {ok, fmt("eps0(1e-6) = %.15g, eps0(100) = %.15g", a, b)};
}

Outcome scattering_limit() {
  const double a = scattering_length_theta(TwoCenterParams{0.0, 1e-8});
  const double d = rel(a, std::sqrt(2.0));
  return {d <= 1e-6, fmt("a = %.15g, rel dev from sqrt2 = %.3e", a, d)};
}

Outcome two_becomes_one() {
  const Complex sum = resolvent_coefficient_sum(gamma_nonlocal(0.0, 1e-6, Complex(-1.0, 0.0)));
  const double limit = 4.0 * kPi / (1.0 - 1.0 / std::sqrt(2.0));
  const double d = std::abs(sum - limit) / limit;
  return {d <= 1e-4, fmt("sum = %.12g, limit = %.12g, rel dev = %.3e", sum.real(), limit, d)};
}

Outcome efimov_ratio() {
  const EfimovSpectrum s = analytic_levels(5.0, 1.0, 6);
  if (s.levels.size() < 6) return {false, "fewer than 6 analytic levels"};
  const double g = std::exp(2.0 * kPi / std::sqrt(4.75));
  double worst = 0.0;
  for (int n = 3; n <= 5; ++n) worst = std::max(worst, rel(s.ratios[n - 1], g));
  const double e5 = rel(s.levels[4], asymptotic_levels(5.0, 1.0, 5, 5).front());
  return {worst <= 1e-2 && e5 <= 1e-2,
          fmt("max ratio dev (levels 3..6) = %.3e, E_5 vs closed form = %.3e", worst, e5)};
}

Outcome cross_oracle() {
  const EfimovSpectrum a = analytic_levels(5.0, 1.0, 3);
  const EfimovSpectrum n = numeric_levels(PiecewisePotential::free_inside(5.0, 1.0), 3);
  if (a.levels.size() < 3 || n.levels.size() < 3) return {false, "missing levels"};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, rel(n.levels[i], a.levels[i]));
  return {worst <= 1e-6, fmt("max rel dev analytic vs shooting = %.3e", worst)};
}

Outcome perturbation_bound() {
  bool ok = true;
  std::string detail;
  for (int m = 1; m <= 3; ++m) {
    const double sup = auxiliary_perturbation_sup(m, 200);
    const double bound = std::exp(-m * kPi) / (m * m);
    ok = ok && sup <= bound;
    detail += fmt("m=%g: %.3e <= %.3e; ", m, sup, bound);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome local_collapse() {
  bool ok = true;
  std::string detail;
  for (double alpha : {-1.0, 0.0, 5.0}) {
    const double v = collapse_diagnostic(alpha, {1e-3}).front();
    const double d = rel(v, kW2);
    ok = ok && d <= 1e-2;
    detail += fmt("alpha=%g: lambda r^2 rel dev %.3e; ", alpha, d);
  }
  const double a = local_scattering_length(CenterConfig::symmetric_pair(1.0, 1e-8));
  ok = ok && std::abs(a) <= 3e-8;
  detail += fmt("|a(alpha=1, r=1e-8)| = %.3e", std::abs(a));
  return {ok, detail};
}

Outcome bo_regime() {
  const BOConfig c{1.0, 20.0, 1.0};
  const BOSpectrum s = bo_levels(c, 6);
  if (s.levels.size() < 5) return {false, fmt("only %g levels", double(s.levels.size()))};
  double worst = 0.0;
  for (int n = 3; n <= 5; ++n) worst = std::max(worst, rel(s.ratios[n - 1], s.geometric_ratio));
  double eps0_min = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    eps0_min = std::min(eps0_min, epsilon0(TwoCenterParams{1.0, 40.0 * i / 4000.0}).value);
  }
  const bool bounded = s.levels.front() >= c.mu() * eps0_min && s.bounded_below;
  return {worst <= 0.05 && bounded,
          fmt("%g levels, max ratio dev (n=3..5) = %.3e, E_1 = %.6e", double(s.levels.size()),
              worst, s.levels.front()) +
              fmt(" >= mu min eps0 = %.6e", c.mu() * eps0_min)};
}

Outcome residuals() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ut(-3.0, 1.0);
  std::uniform_real_distribution<double> lr(-3.0, 2.0);
  double worst_res = 0.0;
  double worst_alpha = 0.0;
  double worst_det = 0.0;
  for (int i = 0; i < 100; ++i) {
    const TwoCenterParams p{ut(rng), std::pow(10.0, lr(rng))};
    const EffectiveEigenvalue e = epsilon0(p);
    if (!e.exists) return {false, "missing eps0 root"};
    const double lambda = e.sqrt_lambda * e.sqrt_lambda;
    worst_res = std::max(worst_res, even_equation_residual(p, e.sqrt_lambda));
    const double scale = e.sqrt_lambda / (4.0 * kPi) + std::abs(alpha_boundary(p)) +
                         green_function(lambda, p.r);
    worst_alpha = std::max(worst_alpha, std::abs(alpha_form_equation(p, lambda, +1)) / scale);
    const GammaMatrix g = gamma_nonlocal(p.t_theta, p.r, Complex(-lambda, 0.0));
    // Entries cancel at the root, so compare against the uncancelled term sizes.
    const double terms = scale + 1.0 / (4.0 * kPi * p.r) + 1.0 / (4.0 * kPi * std::sqrt(2.0));
    worst_det = std::max(worst_det, std::abs(g.determinant()) / (terms * terms));
  }
  const bool ok = worst_res <= 1e-12 && worst_alpha <= 1e-12 && worst_det <= 1e-12;
  return {ok, fmt("max residual %.3e, alpha form %.3e, |det Gamma|/terms^2 %.3e", worst_res,
                  worst_alpha, worst_det)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "pontspec_acceptance";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "command = spectrum-nonlocal\nt-theta = 0.4\ngrid = 0.01:40:200:log\n";
  const std::string bin = PONTSPEC_CLI_PATH;
  bool ok = true;
  std::string detail;
  for (const char* format : {"csv", "json"}) {
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto out = dir / (std::string("out") + std::to_string(k) + "." + format);
      const std::string cmd = "\"" + bin + "\" --config \"" + cfg.string() + "\" --format " +
                              format + " --output \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) return {false, std::string(format) + " run failed"};
      runs[k] = slurp(out);
    }
    const bool same = !runs[0].empty() && runs[0] == runs[1];
    ok = ok && same;
    detail += std::string(format) + (same ? " identical" : " differs") + " (" +
              std::to_string(runs[0].size()) + " bytes); ";
  }
  std::filesystem::remove_all(dir);
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Lambert identity", lambert_identity},
      {"eps0 small-r law", small_r_law},
      {"eps0 exact nodes", exact_nodes},
      {"plateau limits", plateau},
      {"scattering length limit", scattering_limit},
      {"two-becomes-one", two_becomes_one},
      {"Efimov ratio", efimov_ratio},
      {"cross-oracle", cross_oracle},
      {"perturbation bound", perturbation_bound},
      {"local collapse", local_collapse},
      {"BO regime", bo_regime},
      {"eigenvalue-equation residuals", residuals},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
