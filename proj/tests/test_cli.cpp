#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pontspec/cli.hpp"

using namespace pontspec::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("pontspec_test_" + name);
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_CASE("grid parsing") {
  const Grid g = parse_grid("0.5:20:400");
  CHECK(g.count == 400);
  CHECK_FALSE(g.log);
  const auto p = g.points();
  REQUIRE(p.size() == 400);
  CHECK(p.front() == 0.5);
  CHECK(p.back() == 20.0);
  const auto lg = parse_grid("1e-3:10:5:log").points();
  REQUIRE(lg.size() == 5);
  CHECK(lg[1] == doctest::Approx(1e-2).epsilon(1e-14));
  CHECK(lg.back() == 10.0);
  CHECK(parse_grid("2:2:1").points() == std::vector<double>{2.0});
  CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:x"), ConfigError);
  CHECK_THROWS_AS(parse_grid("-1:2:3:log"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:3:cubic"), ConfigError);
}

TEST_CASE("config text parsing") {
  const auto e = parse_config_text("# comment\ncommand = potential\n\n t-theta=0.5 # trailing\n",
                                   "a.cfg");
  REQUIRE(e.size() == 2);
  CHECK(e[0].key == "command");
  CHECK(e[1].key == "t-theta");
  CHECK(e[1].value == "0.5");
  CHECK(e[1].line == 4);
  try {
    parse_config_text("k = 1\nk = 2\n", "dup.cfg");
    FAIL("duplicate accepted");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("dup.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("no equals sign\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("= 3\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("config = other.cfg\n", "x"), ConfigError);
}

TEST_CASE("potential table") {
  const Run r = run_cli({"potential", "--t-theta", "1", "--grid", "0.5:20:400"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 401);
  CHECK(l[0] == "r,epsilon0");
  CHECK(l[1].rfind("0.5,", 0) == 0);
  CHECK(r.out.find('\r') == std::string::npos);
  const Run f = run_cli({"potential", "--figure1"});
  REQUIRE(f.code == 0);
  CHECK(lines(f.out)[0] == "r,epsilon0,inverse_square_tail");
}

TEST_CASE("scattering length near coincidence") {
  const Run r = run_cli({"scattering", "--t-theta", "0", "--r", "1e-8"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "r,scattering_length");
  const double a = std::stod(l[1].substr(l[1].find(',') + 1));
  CHECK(std::abs(a / std::sqrt(2.0) - 1.0) < 1e-6);
}

TEST_CASE("efimov table with both methods") {
  const Run r =
      run_cli({"efimov", "--k", "5", "--r0", "1", "--levels", "3", "--method", "both"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0] == "n,E_analytic,E_numeric,E_asymptotic,ratio");
}

TEST_CASE("JSON mirrors CSV and round-trips") {
  const std::vector<std::string> base{"spectrum-nonlocal", "--t-theta", "-1", "--grid",
                                      "0.1:5:7"};
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  const Run j = run_cli(json_args);
  const Run c = run_cli(base);
  REQUIRE(j.code == 0);
  REQUIRE(c.code == 0);
  const Table t = table_from_json(j.out);
  CHECK(t.command == "spectrum-nonlocal");
  CHECK(to_csv(t) == c.out);
  CHECK(to_json(t) == j.out);
  CHECK(table_from_json(to_json(t)) == t);
}

TEST_CASE("NaN cells") {
  Table t;
  t.command = "x";
  t.columns = {"a", "b"};
  t.rows = {{Cell::integer(3), Cell::real(std::nan(""))}, {Cell::integer(-1), Cell::real(0.1)}};
  CHECK(to_csv(t) == "a,b\n3,nan\n-1,0.1\n");
  const Table back = table_from_json(to_json(t));
  CHECK(back == t);
  CHECK(std::isnan(back.rows[0][1].d));
}

TEST_CASE("config file with flag override") {
  const auto cfg = temp_file("ok.cfg", "command = potential\nt-theta = 0.5\ngrid = 1:2:3\n");
  const Run a = run_cli({"--config", cfg.string()});
  const Run b = run_cli({"potential", "--t-theta", "0.5", "--grid", "1:2:3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Run c = run_cli({"potential", "--config", cfg.string(), "--grid", "1:2:2"});
  REQUIRE(c.code == 0);
  CHECK(lines(c.out).size() == 3);
  std::filesystem::remove(cfg);
}

TEST_CASE("config errors name file and line") {
  const auto cfg = temp_file("bad.cfg", "command = efimov\nk = 5\n\n# x\nmethod = bogus\n");
  const Run r = run_cli({"--config", cfg.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.cfg:5") != std::string::npos);
  std::filesystem::remove(cfg);
  CHECK(run_cli({"potential", "--grid", "1:2"}).code == 2);
  CHECK(run_cli({"potential", "--format", "xml"}).code == 2);
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({"efimov", "--k", "0.1"}).code == 2);
}

TEST_CASE("zero-energy resonance is reported as nan") {
  // t with g0(2, t) = 1: infinite scattering length.
  const double x = std::sqrt(2.0);
  const double t = (1.0 + x - std::exp(-x) * std::cos(x)) / (x + std::exp(-x) * std::sin(x));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  const Run r = run_cli({"scattering", "--t-theta", buf, "--r", "2"});
  CHECK(r.code == 0);
  CHECK(lines(r.out).at(1) == "2,nan");
}

TEST_CASE("thread count does not change output") {
  const std::vector<std::string> args{"spectrum-nonlocal", "--t-theta", "0.3", "--grid",
                                      "0.01:30:64:log"};
  setenv("PONTSPEC_THREADS", "1", 1);
  const Run a = run_cli(args);
  setenv("PONTSPEC_THREADS", "4", 1);
  const Run b = run_cli(args);
  unsetenv("PONTSPEC_THREADS");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(worker_count() >= 1);
}

TEST_CASE("lowest failing row is reported") {
  try {
    parallel_rows(10, [](std::size_t i) -> std::vector<Cell> {
      if (i >= 3) throw std::runtime_error("row " + std::to_string(i));
      return {Cell::integer(long(i))};
    });
    FAIL("no error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "row 3");
  }
}

TEST_CASE("installed binary writes files and exit codes") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / "pontspec_cli_test.json";
  const std::string bin = PONTSPEC_CLI_PATH;
  const std::string cmd = "\"" + bin + "\" bo --mass-ratio 20 --levels 3 --format json --output \"" +
                          out.string() + "\"";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  const Table t = table_from_json(ss.str());
  CHECK(t.columns == std::vector<std::string>{"n", "energy", "ratio"});
  CHECK(t.rows.size() == 3);
  std::filesystem::remove(out);
  const std::string bad = "\"" + bin + "\" potential --grid 1:2 2>/dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
