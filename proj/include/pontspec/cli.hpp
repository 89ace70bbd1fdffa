#pragma once

// Command-line front end: flag and config-file parsing, sweeps and CSV/JSON
// emission. Everything here is plumbing around the numerical modules.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace pontspec::cli {

/// Invalid user input. Exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool log = false;

  std::vector<double> points() const;
};

/// "start:stop:count" or "start:stop:count:log" (":lin" also accepted).
Grid parse_grid(const std::string& text);

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Flat "key = value" lines; '#' starts a comment, blank lines are skipped.
/// Throws ConfigError naming the file and line of the first malformed entry.
std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& origin);

/// A table cell: a number (NaN allowed) or an integer.
struct Cell {
  bool is_int = false;
  long long i = 0;
  double d = 0.0;

  static Cell integer(long long v) { return {true, v, 0.0}; }
  static Cell real(double v) { return {false, 0, v}; }
  bool operator==(const Cell& o) const;
};

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::string meta_json = "{}";  // command-specific scalars, JSON object text

  bool operator==(const Table& o) const;
};

/// Header row then one line per record, shortest round-trip numbers, LF endings.
std::string to_csv(const Table& table);

/// {"command", "columns", "records": [{column: value}], "meta"}; NaN as null.
std::string to_json(const Table& table);

/// Inverse of to_json.
Table table_from_json(const std::string& text);

/// Worker count from PONTSPEC_THREADS (default: hardware concurrency, >= 1).
unsigned worker_count();

/// Evaluates fn(0..n-1) on up to worker_count() threads; results by index.
std::vector<std::vector<Cell>> parallel_rows(std::size_t n,
                                             const std::function<std::vector<Cell>(std::size_t)>& fn);

/// Full program: returns 0 on success, 2 on configuration errors, 1 on
/// numerical failures. Tables go to `out` unless --output names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pontspec::cli
