#include "usc/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "usc/model/costs.hpp"

namespace usc::io {

namespace fs = std::filesystem;

ConfigError::ConfigError(const std::string& file, int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", file, line, message)
                                  : fmt::format("{}: {}", file, message)),
      file_(file),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Typed access to one section; every key read is marked so leftovers can be
// reported as unknown.
class SectionReader {
 public:
  SectionReader(const IniDocument& doc, const IniSection* sec) : doc_(doc), sec_(sec) {}

  bool present() const { return sec_ != nullptr; }
  int line() const { return sec_ ? sec_->line : 0; }
  bool has(const std::string& key) const { return sec_ && sec_->entries.count(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    int ln = line();
    if (sec_) {
      if (const auto it = sec_->entries.find(key); it != sec_->entries.end()) {
        ln = it->second.line;
      }
    }
    throw ConfigError(doc_.file, ln, msg);
  }

  std::optional<std::string> text(const std::string& key) {
    if (!has(key)) return std::nullopt;
    used_.insert(key);
    return sec_->entries.at(key).value;
  }

  std::string required_text(const std::string& key) {
    if (auto v = text(key)) return *v;
    throw ConfigError(doc_.file, line(),
                      fmt::format("[{}] missing required key '{}'", name(), key));
  }

  std::optional<double> number(const std::string& key) {
    const auto t = text(key);
    if (!t) return std::nullopt;
    const auto v = to_double(*t);
    if (!v) fail(key, fmt::format("'{}' is not a number: '{}'", key, *t));
    return v;
  }

  double number(const std::string& key, double fallback) {
    return number(key).value_or(fallback);
  }

  double required_number(const std::string& key) {
    if (auto v = number(key)) return *v;
    throw ConfigError(doc_.file, line(),
                      fmt::format("[{}] missing required key '{}'", name(), key));
  }

  long integer(const std::string& key, long fallback) {
    const auto v = number(key);
    if (!v) return fallback;
    if (*v != std::floor(*v)) fail(key, fmt::format("'{}' must be an integer", key));
    return static_cast<long>(*v);
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto t = text(key);
    if (!t) return fallback;
    if (*t == "true" || *t == "yes" || *t == "1") return true;
    if (*t == "false" || *t == "no" || *t == "0") return false;
    fail(key, fmt::format("'{}' must be true or false", key));
  }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    if (!sec_) return out;
    for (const auto& [k, _] : sec_->entries) {
      if (k.rfind(prefix, 0) == 0) out.push_back(k);
    }
    return out;
  }

  void reject_unknown() const {
    if (!sec_) return;
    for (const auto& [k, e] : sec_->entries) {
      if (!used_.count(k)) {
        throw ConfigError(doc_.file, e.line, fmt::format("[{}] unknown key '{}'", name(), k));
      }
    }
  }

  std::string name() const { return sec_ ? sec_->name : std::string(); }

 private:
  const IniDocument& doc_;
  const IniSection* sec_;
  std::set<std::string> used_;
};

class SeriesSource {
 public:
  SeriesSource(std::uint64_t seed, int horizon, std::optional<SeriesTable> table)
      : seed_(seed), horizon_(horizon), table_(std::move(table)) {}

  // spec: synthetic:pv | synthetic:wind | csv:COLUMN | constant:V
  std::vector<double> resolve(std::string_view spec, SectionReader& sec,
                              const std::string& key, bool fraction) {
    const auto colon = spec.find(':');
    const std::string_view kind = spec.substr(0, colon);
    const std::string_view arg =
        colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (kind == "synthetic") {
      if (horizon_ < 24) sec.fail(key, "synthetic profiles need a horizon of at least 24");
      if (!profiles_) profiles_ = synth_profiles(seed_, horizon_);
      if (arg == "pv") return profiles_->pv;
      if (arg == "wind") return profiles_->wind;
      sec.fail(key, fmt::format("unknown synthetic profile '{}'", arg));
    }
    if (kind == "constant") {
      const auto v = to_double(arg);
      if (!v) sec.fail(key, fmt::format("bad constant '{}'", arg));
      return std::vector<double>(horizon_, *v);
    }
    if (kind == "csv") {
      if (!table_) sec.fail(key, "csv series requested but [scenario] has no series_csv");
      const std::vector<double>& col = table_->column(arg);
      if (static_cast<int>(col.size()) < horizon_) {
        throw ConfigError(table_->file, 0,
                          fmt::format("column '{}' has {} rows, horizon is {}", arg,
                                      col.size(), horizon_));
      }
      for (int t = 0; t < horizon_; ++t) {
        if (fraction && !(col[t] >= 0.0 && col[t] <= 1.0)) {
          throw ConfigError(table_->file, t + 2,
                            fmt::format("column '{}': value {} outside [0, 1]", arg, col[t]));
        }
        if (!fraction && !(col[t] >= 0.0)) {
          throw ConfigError(table_->file, t + 2,
                            fmt::format("column '{}': negative value {}", arg, col[t]));
        }
      }
      return {col.begin(), col.begin() + horizon_};
    }
    sec.fail(key, fmt::format("series '{}' is not synthetic:, constant: or csv:", spec));
  }

 private:
  std::uint64_t seed_;
  int horizon_;
  std::optional<SeriesTable> table_;
  std::optional<Profiles> profiles_;
};

fs::path resolve_path(const fs::path& source, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute() || source.empty()) return path;
  return source.parent_path() / path;
}

std::vector<Variant> parse_variants(std::string_view text) {
  if (trim(text) == "all") return all_variants();
  std::vector<Variant> out;
  for (std::string_view item : split(text, ',')) out.push_back(parse_variant(item));
  return out;
}

}  // namespace

const IniSection* IniDocument::find(std::string_view name) const {
  for (const IniSection& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

IniDocument parse_ini(std::string_view text, const std::string& file) {
  IniDocument doc;
  doc.file = file;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(file, line_no, "unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ConfigError(file, line_no, "empty section name");
      if (!seen.insert(name).second) {
        throw ConfigError(file, line_no, fmt::format("duplicate section [{}]", name));
      }
      doc.sections.push_back({std::move(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(file, line_no, fmt::format("expected key = value, got '{}'", line));
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(file, line_no, "empty key");
    if (doc.sections.empty()) doc.sections.push_back({"", 0, {}});
    auto& entries = doc.sections.back().entries;
    if (entries.count(key)) {
      throw ConfigError(file, line_no, fmt::format("duplicate key '{}'", key));
    }
    entries.emplace(std::move(key), IniEntry{std::string(trim(line.substr(eq + 1))), line_no});
  }
  return doc;
}

const std::vector<double>& SeriesTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return values[i];
  }
  throw ConfigError(file, 1, fmt::format("no column '{}' in series header", name));
}

SeriesTable parse_series_csv(std::string_view text, const std::string& file) {
  SeriesTable table;
  table.file = file;
  int line_no = 0;
  std::size_t pos = 0;
  bool header = false;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (!header) {
      for (auto c : cells) {
        if (c.empty()) throw ConfigError(file, line_no, "empty column name in header");
        table.columns.emplace_back(c);
      }
      table.values.resize(cells.size());
      header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw ConfigError(file, line_no,
                        fmt::format("expected {} fields, found {}", table.columns.size(),
                                    cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto v = to_double(cells[i]);
      if (!v || !std::isfinite(*v)) {
        throw ConfigError(file, line_no,
                          fmt::format("column '{}': '{}' is not a finite number",
                                      table.columns[i], cells[i]));
      }
      table.values[i].push_back(*v);
    }
  }
  if (!header) throw ConfigError(file, 0, "missing header row");
  return table;
}

SeriesTable read_series_csv(const fs::path& path) {
  return parse_series_csv(read_file(path), path.string());
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const auto a = to_double(parts[0]), step = to_double(parts[1]), b = to_double(parts[2]);
    if (!a || !step || !b || !(*step > 0.0) || *b < *a) {
      throw std::invalid_argument(fmt::format("bad grid range '{}'", text));
    }
    const long n = std::lround(std::floor((*b - *a) / *step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(*a + static_cast<double>(i) * *step);
    return out;
  }
  for (std::string_view item : split(text, ',')) {
    const auto v = to_double(item);
    if (!v) throw std::invalid_argument(fmt::format("bad grid value '{}'", item));
    out.push_back(*v);
  }
  return out;
}

void apply_overrides(Scenario& s, const PolicyOverrides& o) {
  if (!o.any()) return;
  PolicySpec& p = s.policy;
  if (p.kind != PolicyKind::kRenewableShare) {
    p = PolicySpec::renewable_share(1, Slcr::kComplete, 0.8);
  }
  if (o.family) p.family = *o.family;
  if (o.slcr) p.slcr = *o.slcr;
  if (o.phi) p.phi = *o.phi;
}

LoadedConfig load_config(const fs::path& path) {
  return parse_config(read_file(path), path);
}

LoadedConfig parse_config(std::string_view text, const fs::path& source) {
  const IniDocument doc = parse_ini(text, source.string());
  LoadedConfig out;
  out.run.source = source;
  Scenario& s = out.scenario;

  for (const IniSection& sec : doc.sections) {
    const bool known = sec.name == "scenario" || sec.name == "policy" ||
                       sec.name == "solver" || sec.name == "sweep" ||
                       sec.name.rfind("technology.", 0) == 0 ||
                       sec.name.rfind("storage.", 0) == 0;
    if (!known) {
      throw ConfigError(doc.file, sec.line,
                        fmt::format("unknown section [{}]", sec.name));
    }
  }

  SectionReader sc(doc, doc.find("scenario"));
  if (!sc.present()) throw ConfigError(doc.file, 0, "missing [scenario] section");
  s.horizon = static_cast<int>(sc.integer("horizon", 672));
  out.run.seed = static_cast<std::uint64_t>(sc.integer("seed", 42));
  s.wrap_storage_level = sc.boolean("wrap_storage_level", true);
  s.hours_per_year = sc.number("hours_per_year", 8760.0);
  const double rate = sc.number("rate", 0.04);
  if (auto dir = sc.text("output_dir")) out.run.output_dir = resolve_path(source, *dir);
  std::optional<SeriesTable> table;
  if (auto csv = sc.text("series_csv")) table = read_series_csv(resolve_path(source, *csv));
  if (s.horizon < 1) sc.fail("horizon", "horizon must be positive");
  SeriesSource series(out.run.seed, s.horizon, std::move(table));
  const std::string demand_spec = sc.text("demand").value_or("synthetic");
  const double twh = sc.number("annual_demand_twh", 520.0);
  if (demand_spec == "synthetic") {
    s.demand = default_demand(s.horizon, twh);
  } else {
    s.demand = series.resolve(demand_spec, sc, "demand", false);
  }
  sc.reject_unknown();

  auto annualized = [&](SectionReader& r, const std::string& prefix) -> std::optional<double> {
    const auto direct = r.number(prefix + "cost");
    const auto overnight = r.number(prefix + "overnight_cost");
    if (direct && overnight) {
      r.fail(prefix + "overnight_cost",
             fmt::format("give either {0}cost or {0}overnight_cost, not both", prefix));
    }
    if (direct) return direct;
    if (!overnight) return std::nullopt;
    const double lifetime = r.required_number(prefix + "lifetime");
    const double fixed = r.number(prefix + "fixed_om", 0.0);
    try {
      return annualize(*overnight, lifetime, r.number("rate", rate), fixed);
    } catch (const std::invalid_argument& e) {
      r.fail(prefix + "lifetime", e.what());
    }
  };

  for (const IniSection& sec : doc.sections) {
    if (sec.name.rfind("technology.", 0) != 0) continue;
    SectionReader r(doc, &sec);
    Technology t;
    t.name = sec.name.substr(11);
    try {
      t.tech_class = parse_tech_class(r.required_text("class"));
    } catch (const std::invalid_argument& e) {
      r.fail("class", e.what());
    }
    t.capacity_cost = annualized(r, "capacity_").value_or(0.0);
    t.variable_cost = r.number("variable_cost", 0.0);
    t.curtailment_cost = r.number("curtailment_cost", 0.0);
    t.emission_factor = r.number("emission_factor", 0.0);
    if (auto spec = r.text("availability")) {
      t.availability = series.resolve(*spec, r, "availability", true);
    } else if (t.renewable()) {
      throw ConfigError(doc.file, sec.line,
                        fmt::format("[{}] missing required key 'availability'", sec.name));
    } else {
      t.availability.assign(s.horizon, 1.0);
    }
    r.reject_unknown();
    s.technologies.push_back(std::move(t));
  }

  for (const IniSection& sec : doc.sections) {
    if (sec.name.rfind("storage.", 0) != 0) continue;
    SectionReader r(doc, &sec);
    Storage st;
    st.name = sec.name.substr(8);
    const auto power = annualized(r, "power_");
    st.charge_cost = annualized(r, "charge_").value_or(power.value_or(0.0));
    st.discharge_cost = annualized(r, "discharge_").value_or(power.value_or(0.0));
    st.energy_cost = annualized(r, "energy_").value_or(0.0);
    const double var = r.number("var_cost", 0.0);
    st.var_charge_cost = r.number("var_charge_cost", var);
    st.var_discharge_cost = r.number("var_discharge_cost", var);
    if (auto rt = r.number("eta_rt")) {
      if (r.has("eta_in") || r.has("eta_out")) {
        r.fail("eta_rt", "give either eta_rt or eta_in/eta_out");
      }
      if (!(*rt > 0.0)) r.fail("eta_rt", "eta_rt must be positive");
      st.eta_in = st.eta_out = std::sqrt(*rt);
    } else {
      st.eta_in = r.number("eta_in", 1.0);
      st.eta_out = r.number("eta_out", 1.0);
    }
    st.self_discharge = r.number("self_discharge", 1.0);
    r.reject_unknown();
    s.storages.push_back(std::move(st));
  }

  SectionReader pol(doc, doc.find("policy"));
  if (pol.present()) {
    PolicySpec& p = s.policy;
    try {
      p.kind = parse_policy_kind(pol.text("kind").value_or("none"));
      if (auto slcr = pol.text("slcr")) p.slcr = parse_slcr(*slcr);
    } catch (const std::invalid_argument& e) {
      pol.fail(pol.has("slcr") ? "slcr" : "kind", e.what());
    }
    p.family = static_cast<int>(pol.integer("family", 1));
    p.phi = pol.number("phi", 0.0);
    p.cap = pol.number("cap", std::numeric_limits<double>::infinity());
    p.price = pol.number("price", 0.0);
    for (const std::string& key : pol.keys_with_prefix("target.")) {
      p.capacity_targets[key.substr(7)] = *pol.number(key);
    }
    pol.reject_unknown();
  }

  SectionReader sol(doc, doc.find("solver"));
  if (sol.present()) {
    lp::SolverOptions& o = out.run.solver;
    o.feas_tol = sol.number("feas_tol", o.feas_tol);
    o.opt_tol = sol.number("opt_tol", o.opt_tol);
    o.max_iterations = sol.integer("max_iterations", o.max_iterations);
    o.refactor_interval = static_cast<int>(sol.integer("refactor_interval", o.refactor_interval));
    out.run.cycling_tol = sol.number("cycling_tol", out.run.cycling_tol);
    out.run.threads = static_cast<int>(sol.integer("threads", 0));
    sol.reject_unknown();
  }

  const auto violations = validate_scenario(s);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    int line = sc.line();
    for (const IniSection& sec : doc.sections) {
      const auto dot = sec.name.find('.');
      if (dot != std::string::npos &&
          v.message.find("'" + sec.name.substr(dot + 1) + "'") != std::string::npos) {
        line = sec.line;
        break;
      }
    }
    if (v.code.find("phi") != std::string::npos || v.code.find("carbon") != std::string::npos ||
        v.code.find("target") != std::string::npos || v.code == "invalid_family") {
      if (pol.present()) line = pol.line();
    }
    throw ConfigError(doc.file, line, fmt::format("[{}] {}", v.code, v.message));
  }

  SectionReader sw(doc, doc.find("sweep"));
  if (sw.present()) {
    SweepSpec spec;
    spec.base = s;
    try {
      spec.axis = parse_sweep_axis(sw.required_text("axis"));
    } catch (const SweepError& e) {
      sw.fail("axis", e.what());
    }
    try {
      spec.grid = parse_grid(sw.required_text("grid"));
    } catch (const std::invalid_argument& e) {
      sw.fail("grid", e.what());
    }
    try {
      spec.variants = parse_variants(sw.text("variants").value_or("all"));
    } catch (const std::invalid_argument& e) {
      sw.fail("variants", e.what());
    }
    sw.reject_unknown();
    out.sweep = std::move(spec);
  }
  return out;
}

}  // namespace usc::io
