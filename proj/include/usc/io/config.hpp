#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "usc/harness/harness.hpp"
#include "usc/lp/solver.hpp"
#include "usc/model/scenario.hpp"

namespace usc::io {

/// Error carrying the source position, rendered as "file:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

/// One `key = value` entry of a section, with its line for diagnostics.
struct IniEntry {
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;
  int line = 0;
  std::map<std::string, IniEntry> entries;
};

struct IniDocument {
  std::string file;
  /// In file order. Keys before the first header land in a section named "".
  std::vector<IniSection> sections;

  const IniSection* find(std::string_view name) const;
};

/// `[section]` headers, `key = value` pairs, `#` or `;` comment lines.
/// Duplicate sections or keys are errors.
IniDocument parse_ini(std::string_view text, const std::string& file = "<string>");

/// Comma-separated numeric table with a header row. Lines starting with '#'
/// are skipped.
struct SeriesTable {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // per column

  /// Throws ConfigError naming the column when it does not exist.
  const std::vector<double>& column(std::string_view name) const;
};

SeriesTable read_series_csv(const std::filesystem::path& path);
SeriesTable parse_series_csv(std::string_view text, const std::string& file);

struct RunConfig {
  std::filesystem::path source;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;
  lp::SolverOptions solver;
  double cycling_tol = 1e-6;
  /// 0: let the harness decide.
  int threads = 0;

  RunOptions run_options() const { return {solver, cycling_tol}; }
};

struct LoadedConfig {
  Scenario scenario;
  RunConfig run;
  /// Present when the file has a [sweep] section.
  std::optional<SweepSpec> sweep;
};

/// Reads a config file; relative paths inside it resolve against its
/// directory. The scenario is validated; every violation is reported with the
/// line of the section that caused it.
LoadedConfig load_config(const std::filesystem::path& path);
LoadedConfig parse_config(std::string_view text, const std::filesystem::path& source);

struct PolicyOverrides {
  std::optional<int> family;
  std::optional<Slcr> slcr;
  std::optional<double> phi;

  bool any() const { return family || slcr || phi; }
};

/// Turns the policy into a renewable share with the overridden fields; other
/// fields keep the configured renewable share values (defaults 1, complete,
/// 0.8 when the configured policy is of another kind).
void apply_overrides(Scenario& s, const PolicyOverrides& o);

/// Parses "0.2,0.4" lists and "start:step:stop" ranges (inclusive stop).
std::vector<double> parse_grid(std::string_view text);

}  // namespace usc::io
