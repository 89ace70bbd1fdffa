#include "pontspec/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pontspec/born_oppenheimer.hpp"
#include "pontspec/efimov.hpp"
#include "pontspec/errors.hpp"
#include "pontspec/local_spectrum.hpp"
#include "pontspec/two_center.hpp"

namespace pontspec::cli {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kCommands = {"potential", "spectrum-local", "spectrum-nonlocal",
                                            "efimov",    "bo",             "scattering"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

json cell_json(const Cell& c) {
  if (c.is_int) return c.i;
  if (!std::isfinite(c.d)) return nullptr;
  return c.d;
}

// Every option a subcommand may carry. Unused fields keep their defaults.
struct Options {
  std::string config;
  std::string output;
  std::string format = "csv";
  std::string grid;
  double t_theta = 1.0;
  double r = kNaN;
  bool figure1 = false;
  std::string alphas;
  std::string positions;
  double alpha = kNaN;
  double momentum = kNaN;
  double k = 5.0;
  double r0 = 1.0;
  int levels = 6;
  std::string method = "analytic";
  int auxiliary = -1;
  double mass_ratio = kNaN;
  double m_light = 1.0;
  double M_heavy = kNaN;
};

struct Parsed {
  std::unique_ptr<CLI::App> app;
  std::string command;
};

void add_common(CLI::App& sub, Options& o) {
  sub.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub.add_option("--config", o.config, "flat key = value file; flags override it");
  sub.add_option("--output", o.output, "output file (default: standard output)");
  sub.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

std::unique_ptr<CLI::App> build_app(Options& o) {
  auto app = std::make_unique<CLI::App>("Spectra of point-interaction Hamiltonians", "pontspec");
  app->require_subcommand(1);
  app->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* pot = app->add_subcommand("potential", "two-center eigenvalue eps0(R) over a grid");
  add_common(*pot, o);
  pot->add_option("--t-theta", o.t_theta, "tan(theta/2)");
  pot->add_option("--grid", o.grid, "start:stop:count[:log]");
  pot->add_flag("--figure1", o.figure1, "eps0(R, 1) and -W(1)^2/R^2 on [0.5, 20]");

  auto* loc = app->add_subcommand("spectrum-local", "local n-center bound states");
  add_common(*loc, o);
  loc->add_option("--alphas", o.alphas, "comma-separated strengths")->required();
  loc->add_option("--positions", o.positions, "x,y,z;x,y,z;... (one triple per center)");
  loc->add_option("--r", o.r, "pair separation (centers on the z axis)");
  loc->add_option("--grid", o.grid, "sweep of the pair separation");

  auto* nl = app->add_subcommand("spectrum-nonlocal", "non-local two-center eigenvalues");
  add_common(*nl, o);
  nl->add_option("--t-theta", o.t_theta, "tan(theta/2)");
  nl->add_option("--r", o.r, "separation");
  nl->add_option("--grid", o.grid, "sweep of the separation");

  auto* ef = app->add_subcommand("efimov", "levels of an inverse-square tail");
  add_common(*ef, o);
  ef->add_option("--k", o.k, "tail strength, V = -k/r^2 beyond r0");
  ef->add_option("--r0", o.r0, "tail start");
  ef->add_option("--levels", o.levels, "number of levels");
  ef->add_option("--method", o.method, "analytic, numeric, both or asymptotic")
      ->check(CLI::IsMember({"analytic", "numeric", "both", "asymptotic"}));
  ef->add_option("--auxiliary", o.auxiliary,
                 "numeric levels of eps0(., 1) cut at node radius R_m (sets k and r0)");

  auto* bo = app->add_subcommand("bo", "Born-Oppenheimer three-body levels");
  add_common(*bo, o);
  bo->add_option("--mass-ratio", o.mass_ratio, "M/m with m = 1");
  bo->add_option("--m-light", o.m_light, "light mass");
  bo->add_option("--M-heavy", o.M_heavy, "heavy mass");
  bo->add_option("--t-theta", o.t_theta, "tan(theta/2), at most 1");
  bo->add_option("--levels", o.levels, "number of levels");

  auto* sc = app->add_subcommand("scattering", "scattering length (and forward amplitude)");
  add_common(*sc, o);
  sc->add_option("--t-theta", o.t_theta, "tan(theta/2), non-local pair");
  sc->add_option("--alpha", o.alpha, "local pair strength (replaces the non-local pair)");
  sc->add_option("--r", o.r, "separation");
  sc->add_option("--grid", o.grid, "sweep of the separation");
  sc->add_option("--momentum", o.momentum, "|k| along z for the forward amplitude");
  return app;
}

void parse_into(CLI::App& app, std::vector<std::string> argv) {
  std::reverse(argv.begin(), argv.end());
  app.parse(argv);
}

std::string active_command(const CLI::App& app) {
  for (const auto* sub : app.get_subcommands()) return sub->get_name();
  return {};
}

bool given(const CLI::App& app, const std::string& name) {
  for (const auto* sub : app.get_subcommands()) {
    if (const CLI::Option* opt = sub->get_option_no_throw(name)) return opt->count() > 0;
  }
  return false;
}

std::vector<double> grid_or_single(const Options& o, const CLI::App& app, const char* fallback) {
  if (given(app, "--grid") && given(app, "--r")) throw ConfigError("--grid and --r are exclusive");
  if (given(app, "--r")) return {o.r};
  if (!o.grid.empty()) return parse_grid(o.grid).points();
  if (fallback) return parse_grid(fallback).points();
  throw ConfigError("one of --r or --grid is required");
}

Table cmd_potential(const Options& o, const CLI::App& app) {
  Table t;
  t.command = "potential";
  double t_theta = o.t_theta;
  std::string grid = o.grid.empty() ? "0.5:20:400" : o.grid;
  if (o.figure1) {
    if (given(app, "--t-theta") && o.t_theta != 1.0) {
      throw ConfigError("--figure1 is drawn at t-theta = 1");
    }
    t_theta = 1.0;
    t.columns = {"r", "epsilon0", "inverse_square_tail"};
  } else {
    t.columns = {"r", "epsilon0"};
  }
  const std::vector<double> rs = parse_grid(grid).points();
  for (double r : rs) {
    if (!(r > 0.0)) throw ConfigError("--grid: radii must be positive");
  }
  const double w2 = omega_constant() * omega_constant();
  const bool fig = o.figure1;
  t.rows = parallel_rows(rs.size(), [&](std::size_t i) {
    const double r = rs[i];
    const EffectiveEigenvalue e = epsilon0(TwoCenterParams{t_theta, r});
    std::vector<Cell> row{Cell::real(r), Cell::real(e.exists ? e.value : kNaN)};
    if (fig) row.push_back(Cell::real(-w2 / (r * r)));
    return row;
  });
  t.meta_json = json{{"t_theta", t_theta}}.dump();
  return t;
}

std::vector<Vec3> parse_positions(const std::string& text) {
  std::vector<Vec3> out;
  std::stringstream ss(text);
  std::string triple;
  while (std::getline(ss, triple, ';')) {
    const std::vector<double> v = parse_list(triple, "--positions");
    if (v.size() != 3) throw ConfigError("--positions: each center needs three coordinates");
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

Table cmd_spectrum_local(const Options& o, const CLI::App& app) {
  Table t;
  t.command = "spectrum-local";
  std::vector<double> alphas = parse_list(o.alphas, "--alphas");

  if (!o.grid.empty()) {
    if (alphas.size() != 1) throw ConfigError("--grid sweeps a symmetric pair: give one alpha");
    const std::vector<double> rs = parse_grid(o.grid).points();
    const double alpha = alphas[0];
    t.columns = {"r", "ground_energy", "lambda_r2"};
    t.rows = parallel_rows(rs.size(), [&](std::size_t i) {
      const double r = rs[i];
      const LocalSpectrum s = local_eigenvalues(CenterConfig::symmetric_pair(alpha, r));
      const double e = s.eigenvalues.empty() ? kNaN : s.eigenvalues.front();
      return std::vector<Cell>{Cell::real(r), Cell::real(e), Cell::real(-e * r * r)};
    });
    t.meta_json = json{{"alpha", alpha}}.dump();
    return t;
  }

  CenterConfig config;
  if (!o.positions.empty()) {
    if (given(app, "--r")) throw ConfigError("--positions and --r are exclusive");
    config = CenterConfig::local(parse_positions(o.positions), alphas);
  } else if (given(app, "--r")) {
    if (alphas.size() == 1) alphas.push_back(alphas[0]);
    if (alphas.size() != 2) throw ConfigError("--r describes a pair: give one or two alphas");
    config = CenterConfig::local({Vec3{0.0, 0.0, -0.5 * o.r}, Vec3{0.0, 0.0, 0.5 * o.r}}, alphas);
  } else if (alphas.size() == 1) {
    config = CenterConfig::local({Vec3{0.0, 0.0, 0.0}}, alphas);
  } else {
    throw ConfigError("several alphas need --positions or --r");
  }
  try {
    config.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const LocalSpectrum s = local_eigenvalues(config);
  t.columns = {"n", "energy"};
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    t.rows.push_back({Cell::integer(static_cast<long long>(i + 1)), Cell::real(s.eigenvalues[i])});
  }
  json meta;
  meta["scattering_length"] = nullptr;
  try {
    meta["scattering_length"] = local_scattering_length(config);
  } catch (const SingularMatrixError&) {
    // zero-energy resonance: infinite scattering length
  }
  meta["collapse_scale"] = s.collapse_scale ? json(*s.collapse_scale) : json(nullptr);
  t.meta_json = meta.dump();
  return t;
}

Table cmd_spectrum_nonlocal(const Options& o, const CLI::App& app) {
  Table t;
  t.command = "spectrum-nonlocal";
  const std::vector<double> rs = grid_or_single(o, app, nullptr);
  t.columns = {"r", "epsilon0", "epsilon1", "alpha", "residual"};
  const double tt = o.t_theta;
  t.rows = parallel_rows(rs.size(), [&](std::size_t i) {
    const TwoCenterParams p{tt, rs[i]};
    const EffectiveEigenvalue e0 = epsilon0(p);
    const EffectiveEigenvalue e1 = epsilon1(p);
    const double res = e0.exists ? even_equation_residual(p, e0.sqrt_lambda) : kNaN;
    return std::vector<Cell>{Cell::real(p.r), Cell::real(e0.exists ? e0.value : kNaN),
                             Cell::real(e1.exists ? e1.value : kNaN),
                             Cell::real(alpha_boundary(p)), Cell::real(res)};
  });
  t.meta_json = json{{"t_theta", tt}}.dump();
  return t;
}

Table cmd_efimov(const Options& o, const CLI::App& app) {
  Table t;
  t.command = "efimov";
  if (o.levels < 1) throw ConfigError("--levels must be at least 1");
  const bool aux = o.auxiliary >= 0;
  if (aux && (given(app, "--k") || given(app, "--r0"))) {
    throw ConfigError("--auxiliary fixes k and r0");
  }
  if (aux && o.method != "numeric") throw ConfigError("--auxiliary needs --method numeric");
  const double k = aux ? omega_constant() * omega_constant() : o.k;
  const double r0 = aux ? node_radius(o.auxiliary) : o.r0;
  if (!(r0 > 0.0)) throw ConfigError("--r0 must be positive");
  if (o.method != "numeric" && !(k > 0.25)) {
    throw ConfigError("--k must exceed 1/4 for the analytic and asymptotic levels");
  }

  const int n = o.levels;
  std::vector<double> ana(n, kNaN), num(n, kNaN), asy(n, kNaN);
  const bool want_ana = o.method == "analytic" || o.method == "both";
  const bool want_num = o.method == "numeric" || o.method == "both";
  if (want_ana) {
    const EfimovSpectrum s = analytic_levels(k, r0, n);
    for (std::size_t i = 0; i < s.levels.size(); ++i) ana[i] = s.levels[i];
  }
  if (want_num) {
    const PiecewisePotential pot =
        aux ? auxiliary_potential(o.auxiliary).base : PiecewisePotential::free_inside(k, r0);
    const EfimovSpectrum s = numeric_levels(pot, n);
    for (std::size_t i = 0; i < s.levels.size(); ++i) num[i] = s.levels[i];
  }
  if (k > 0.25 && !aux) {
    const std::vector<double> a = asymptotic_levels(k, r0, 1, n);
    std::copy(a.begin(), a.end(), asy.begin());
  }
  const std::vector<double>& primary = want_ana ? ana : (want_num ? num : asy);

  t.columns = {"n", "E_analytic", "E_numeric", "E_asymptotic", "ratio"};
  for (int i = 0; i < n; ++i) {
    const double ratio = i + 1 < n ? primary[i] / primary[i + 1] : kNaN;
    t.rows.push_back({Cell::integer(i + 1), Cell::real(ana[i]), Cell::real(num[i]),
                      Cell::real(asy[i]), Cell::real(ratio)});
  }
  json meta{{"k", k}, {"r0", r0}, {"method", o.method}};
  if (k > 0.25) {
    const BetaConstants c = beta_constants(k);
    meta["beta"] = c.beta;
    meta["geometric_ratio"] = std::exp(2.0 * kPi / c.beta);
  }
  t.meta_json = meta.dump();
  return t;
}

Table cmd_bo(const Options& o, const CLI::App& app) {
  Table t;
  t.command = "bo";
  if (o.levels < 1) throw ConfigError("--levels must be at least 1");
  BOConfig config;
  config.t_theta = o.t_theta;
  if (given(app, "--mass-ratio")) {
    if (given(app, "--M-heavy") || given(app, "--m-light")) {
      throw ConfigError("--mass-ratio excludes --m-light/--M-heavy");
    }
    config.m_light = 1.0;
    config.M_heavy = o.mass_ratio;
  } else if (given(app, "--M-heavy")) {
    config.m_light = o.m_light;
    config.M_heavy = o.M_heavy;
  } else {
    throw ConfigError("give --mass-ratio or --M-heavy");
  }
  if (!(config.m_light > 0.0) || !(config.M_heavy > 0.0)) {
    throw ConfigError("masses must be positive");
  }
  if (config.t_theta > 1.0) throw ConfigError("--t-theta must be at most 1 for the BO potential");

  const BOSpectrum s = bo_levels(config, o.levels);
  t.columns = {"n", "energy", "ratio"};
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    const double ratio = i < s.ratios.size() ? s.ratios[i] : kNaN;
    t.rows.push_back({Cell::integer(s.labels[i]), Cell::real(s.levels[i]), Cell::real(ratio)});
  }
  json meta{{"m_light", config.m_light},
            {"M_heavy", config.M_heavy},
            {"t_theta", config.t_theta},
            {"nu", config.nu()},
            {"mu", config.mu()},
            {"effective_k", s.effective_k},
            {"effective_k_fast", s.effective_k_fast},
            {"efimov_regime", s.efimov_regime},
            {"threshold", s.threshold},
            {"potential_min", s.potential_min},
            {"bounded_below", s.bounded_below},
            {"nu_scaling_deviation", s.scaling.max_relative_deviation}};
  if (s.effective_k > 0.25) {
    meta["beta"] = s.beta;
    meta["geometric_ratio"] = s.geometric_ratio;
  }
  t.meta_json = meta.dump();
  return t;
}

Table cmd_scattering(const Options& o, const CLI::App& app) {
  Table t;
  t.command = "scattering";
  const std::vector<double> rs = grid_or_single(o, app, nullptr);
  const bool local = given(app, "--alpha");
  if (local && given(app, "--t-theta")) throw ConfigError("--alpha and --t-theta are exclusive");
  const bool amplitude = given(app, "--momentum");
  if (amplitude && local) throw ConfigError("--momentum applies to the non-local pair");
  if (amplitude && !(o.momentum > 0.0)) throw ConfigError("--momentum must be positive");

  t.columns = {"r", "scattering_length"};
  if (amplitude) {
    t.columns.push_back("amplitude_re");
    t.columns.push_back("amplitude_im");
  }
  const double tt = o.t_theta;
  const double alpha = o.alpha;
  const double q = o.momentum;
  t.rows = parallel_rows(rs.size(), [&](std::size_t i) {
    const double r = rs[i];
    double a = kNaN;
    try {
      a = local ? local_scattering_length(CenterConfig::symmetric_pair(alpha, r))
                : scattering_length_theta(TwoCenterParams{tt, r});
    } catch (const SingularMatrixError&) {
      // resonance: reported as NaN
    }
    std::vector<Cell> row{Cell::real(r), Cell::real(a)};
    if (amplitude) {
      const ScatteringRecord rec = scattering_record(TwoCenterParams{tt, r}, Vec3{0.0, 0.0, q});
      row.push_back(Cell::real(rec.amplitude.real()));
      row.push_back(Cell::real(rec.amplitude.imag()));
    }
    return row;
  });
  json meta;
  if (local) {
    meta["alpha"] = alpha;
  } else {
    meta["t_theta"] = tt;
  }
  t.meta_json = meta.dump();
  return t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  return path;
}

}  // namespace

bool Cell::operator==(const Cell& o) const {
  if (is_int != o.is_int) return false;
  if (is_int) return i == o.i;
  if (std::isnan(d) && std::isnan(o.d)) return true;
  return d == o.d;
}

bool Table::operator==(const Table& o) const {
  return command == o.command && columns == o.columns && rows == o.rows &&
         json::parse(meta_json) == json::parse(o.meta_json);
}

std::vector<double> Grid::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
    if (log) {
      out.push_back(i + 1 == count && count > 1 ? stop : start * std::pow(stop / start, f));
    } else {
      out.push_back(i + 1 == count && count > 1 ? stop : start + (stop - start) * f);
    }
  }
  return out;
}

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3 && parts.size() != 4) {
    throw ConfigError("--grid: expected start:stop:count[:log], got '" + text + "'");
  }
  Grid g;
  g.start = parse_number(parts[0], "--grid start");
  g.stop = parse_number(parts[1], "--grid stop");
  const double count = parse_number(parts[2], "--grid count");
  if (!(count >= 1.0) || count != std::floor(count) || count > 1e7) {
    throw ConfigError("--grid: count must be a positive integer");
  }
  g.count = static_cast<int>(count);
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      g.log = true;
    } else if (parts[3] != "lin") {
      throw ConfigError("--grid: spacing must be 'log' or 'lin', got '" + parts[3] + "'");
    }
  }
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) {
    throw ConfigError("--grid: bounds must be finite");
  }
  if (g.log && !(g.start > 0.0 && g.stop > 0.0)) {
    throw ConfigError("--grid: log spacing needs positive bounds");
  }
  return g;
}

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& origin) {
  std::vector<ConfigEntry> out;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    ConfigEntry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(where + "missing key");
    if (e.value.empty()) throw ConfigError(where + "missing value for '" + e.key + "'");
    if (e.key.rfind("--", 0) == 0) e.key = e.key.substr(2);
    if (e.key == "config") throw ConfigError(where + "config files cannot include others");
    for (const auto& prev : out) {
      if (prev.key == e.key) {
        throw ConfigError(where + "'" + e.key + "' already set on line " + std::to_string(prev.line));
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (row[c].is_int) {
        out += std::to_string(row[c].i);
      } else {
        append_number(out, row[c].d);
      }
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  json records = json::array();
  for (const auto& row : table.rows) {
    json rec = json::object();
    for (std::size_t c = 0; c < row.size(); ++c) rec[table.columns[c]] = cell_json(row[c]);
    records.push_back(std::move(rec));
  }
  json doc{{"command", table.command},
           {"columns", table.columns},
           {"records", std::move(records)},
           {"meta", json::parse(table.meta_json)}};
  return doc.dump(2) + "\n";
}

Table table_from_json(const std::string& text) {
  const json doc = json::parse(text);
  Table t;
  t.command = doc.at("command").get<std::string>();
  t.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& rec : doc.at("records")) {
    std::vector<Cell> row;
    for (const auto& c : t.columns) {
      const json& v = rec.at(c);
      if (v.is_null()) {
        row.push_back(Cell::real(kNaN));
      } else if (v.is_number_integer()) {
        row.push_back(Cell::integer(v.get<long long>()));
      } else {
        row.push_back(Cell::real(v.get<double>()));
      }
    }
    t.rows.push_back(std::move(row));
  }
  t.meta_json = doc.at("meta").dump();
  return t;
}

unsigned worker_count() {
  if (const char* env = std::getenv("PONTSPEC_THREADS")) {
    const std::string s = trim(env);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::vector<Cell>> parallel_rows(
    std::size_t n, const std::function<std::vector<Cell>(std::size_t)>& fn) {
  std::vector<std::vector<Cell>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += workers) {
      try {
        rows[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  // Lowest index first, so the reported failure does not depend on scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    std::vector<ConfigEntry> entries;
    std::string origin;
    if (auto path = find_config_path(args)) {
      origin = *path;
      entries = parse_config_text(read_file(*path), origin);
    }

    // Subcommand: from the arguments, else from the config file.
    std::vector<std::string> argv = args;
    auto sub_it = std::find_if(argv.begin(), argv.end(), [](const std::string& a) {
      return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
    });
    std::string command;
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      if (it->key != "command") continue;
      if (sub_it == argv.end()) {
        if (std::find(kCommands.begin(), kCommands.end(), it->value) == kCommands.end()) {
          throw ConfigError(origin + ":" + std::to_string(it->line) + ": unknown command '" +
                            it->value + "'");
        }
        argv.insert(argv.begin(), it->value);
        sub_it = argv.begin();
      }
      entries.erase(it);
      break;
    }

    // Each config entry is checked on its own so errors carry its line.
    std::vector<std::string> from_file;
    if (sub_it != argv.end()) {
      for (const auto& e : entries) {
        Options scratch;
        auto app = build_app(scratch);
        const std::string flag = "--" + e.key + "=" + e.value;
        try {
          parse_into(*app, {*sub_it, flag});
        } catch (const CLI::RequiredError&) {
          // required options may come from elsewhere
        } catch (const CLI::ParseError& pe) {
          throw ConfigError(origin + ":" + std::to_string(e.line) + ": '" + e.key + "': " +
                            pe.what());
        }
        from_file.push_back(flag);
      }
      argv.insert(sub_it + 1, from_file.begin(), from_file.end());
    }

    Options o;
    auto app = build_app(o);
    try {
      parse_into(*app, argv);
    } catch (const CLI::CallForHelp& e) {
      app->exit(e, out, err);
      return 0;
    } catch (const CLI::CallForAllHelp& e) {
      app->exit(e, out, err);
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }

    const std::string cmd = active_command(*app);
    Table table;
    if (cmd == "potential") {
      table = cmd_potential(o, *app);
    } else if (cmd == "spectrum-local") {
      table = cmd_spectrum_local(o, *app);
    } else if (cmd == "spectrum-nonlocal") {
      table = cmd_spectrum_nonlocal(o, *app);
    } else if (cmd == "efimov") {
      table = cmd_efimov(o, *app);
    } else if (cmd == "bo") {
      table = cmd_bo(o, *app);
    } else {
      table = cmd_scattering(o, *app);
    }

    const std::string text = o.format == "json" ? to_json(table) : to_csv(table);
    if (o.output.empty()) {
      out << text;
    } else {
      std::ofstream file(o.output, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError("cannot write '" + o.output + "'");
      file << text;
      if (!file) {
        err << "error: writing '" << o.output << "' failed\n";
        return 1;
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: numerical failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pontspec::cli
