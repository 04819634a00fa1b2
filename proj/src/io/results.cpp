#include "usc/io/results.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace usc::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

void schema_line(std::ostream& out) { out << "#schema_version=" << kSchemaVersion << '\n'; }

void csv_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

// Rounded to the same 12 significant digits as the CSVs; non-finite -> null.
Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

double column_sum(const lp::Solution& sol, const std::vector<int>& cols) {
  double s = 0.0;
  for (int c : cols) s += sol.primal[c];
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", v);
}

std::string results_json(const RunResult& run) {
  const Scenario& s = run.scenario;
  const lp::Solution& sol = run.solution;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = std::string(lp::to_string(sol.status));
  j["horizon"] = s.horizon;
  Json pol;
  pol["kind"] = std::string(to_string(s.policy.kind));
  if (s.policy.kind == PolicyKind::kRenewableShare) {
    pol["variant"] = variant_label(s.policy.family, s.policy.slcr);
  }
  if (s.policy.kind == PolicyKind::kRenewableShare ||
      s.policy.kind == PolicyKind::kPotentialShare) {
    pol["phi"] = number(s.policy.phi);
  }
  if (s.policy.kind == PolicyKind::kCarbonCap) pol["cap"] = number(s.policy.cap);
  if (s.policy.kind == PolicyKind::kCarbonPrice) pol["price"] = number(s.policy.price);
  j["policy"] = pol;
  if (!sol.optimal()) return j.dump(2) + "\n";

  const MetricsReport& m = run.metrics;
  j["objective"] = number(sol.objective);
  j["iterations"] = sol.iterations;
  Json caps = Json::object(), gen = Json::object(), curt = Json::object();
  for (const TechColumns& tc : run.layout.techs) {
    caps[tc.name] = number(sol.primal[tc.capacity]);
    gen[tc.name] = number(column_sum(sol, tc.gen));
    if (tc.renewable) curt[tc.name] = number(column_sum(sol, tc.curtail));
  }
  j["capacities"] = caps;
  j["generation"] = gen;
  j["curtailment"] = curt;
  j["shares"] = {{"zero", number(m.share_zero)},
                 {"proportionate", number(m.share_proportionate)},
                 {"complete", number(m.share_complete)}};
  j["emissions"] = number(m.emissions);
  j["mu_policy"] = number(m.mu_policy);
  j["loss_factor"] = number(m.loss_factor);
  j["totals"] = {{"demand", number(m.totals.demand)},
                 {"renewable", number(m.totals.renewable)},
                 {"conventional", number(m.totals.conventional)},
                 {"curtailment", number(m.totals.curtailment)},
                 {"charge", number(m.totals.charge)},
                 {"discharge", number(m.totals.discharge)},
                 {"storage_losses", number(m.totals.storage_losses())}};
  Json storages = Json::array();
  for (const StorageMetrics& sm : m.storages) {
    storages.push_back({{"name", sm.name},
                        {"cap_in", number(sm.cap_in)},
                        {"cap_out", number(sm.cap_out)},
                        {"cap_level", number(sm.cap_level)},
                        {"lcos", number(sm.lcos)},
                        {"market_value", number(sm.market_value)},
                        {"nsl", number(sm.nsl)},
                        {"zero_profit_residual", number(sm.zero_profit_residual)}});
  }
  j["storages"] = storages;
  const CyclingReport& c = run.cycling;
  j["cycling"] = {{"hours", c.hours},
                  {"spc", number(c.total_spc)},
                  {"apc", number(c.total_apc)},
                  {"unintended_discharge", number(c.total_unintended_discharge)},
                  {"unintended_use", number(c.total_unintended_use())},
                  {"losses", number(c.total_losses)},
                  {"type_counts", {c.type_counts[1], c.type_counts[2], c.type_counts[3],
                                   c.type_counts[4]}}};
  return j.dump(2) + "\n";
}

void write_dispatch_csv(std::ostream& out, const RunResult& run) {
  const VarLayout& L = run.layout;
  const auto& x = run.solution.primal;
  schema_line(out);
  std::vector<std::string> header = {"t", "demand"};
  for (const TechColumns& tc : L.techs) header.push_back("G[" + tc.name + "]");
  for (const TechColumns& tc : L.techs) {
    if (tc.renewable) header.push_back("CU[" + tc.name + "]");
  }
  for (const StorageColumns& sc : L.storages) {
    header.push_back("in[" + sc.name + "]");
    header.push_back("out[" + sc.name + "]");
    header.push_back("level[" + sc.name + "]");
  }
  header.push_back("price");
  header.push_back("cycling");
  csv_line(out, header);
  if (!run.solution.optimal()) return;
  for (int t = 0; t < L.horizon; ++t) {
    std::vector<std::string> row = {std::to_string(t), format_number(run.scenario.demand[t])};
    for (const TechColumns& tc : L.techs) row.push_back(format_number(x[tc.gen[t]]));
    for (const TechColumns& tc : L.techs) {
      if (tc.renewable) row.push_back(format_number(x[tc.curtail[t]]));
    }
    for (const StorageColumns& sc : L.storages) {
      row.push_back(format_number(x[sc.g_in[t]]));
      row.push_back(format_number(x[sc.g_out[t]]));
      row.push_back(format_number(x[sc.level[t]]));
    }
    row.push_back(format_number(run.solution.dual[L.balance_rows[t]]));
    row.push_back(run.cycling.cycling_hour.size() > static_cast<std::size_t>(t) &&
                          run.cycling.cycling_hour[t]
                      ? "1"
                      : "0");
    csv_line(out, row);
  }
}

void write_rldc_csv(std::ostream& out, const RunResult& run) {
  schema_line(out);
  csv_line(out, {"rank", "raw", "after_curtailment", "after_storage"});
  const Rldc& r = run.metrics.rldc;
  for (std::size_t i = 0; i < r.raw.size(); ++i) {
    csv_line(out, {std::to_string(i), format_number(r.raw[i]),
                   format_number(r.after_curtailment[i]), format_number(r.after_storage[i])});
  }
}

void write_cycling_csv(std::ostream& out, const RunResult& run) {
  schema_line(out);
  csv_line(out, {"storage", "t", "type", "charge", "discharge", "spc", "apc",
                 "unintended_discharge", "losses", "intended_charge", "intended_discharge"});
  for (const CyclingEvent& e : run.cycling.events) {
    csv_line(out, {run.layout.storages.at(e.storage).name, std::to_string(e.hour),
                   std::to_string(static_cast<int>(e.type)), format_number(e.charge),
                   format_number(e.discharge), format_number(e.spc), format_number(e.apc),
                   format_number(e.unintended_discharge), format_number(e.unintended_losses),
                   format_number(e.intended_charge), format_number(e.intended_discharge)});
  }
}

std::vector<fs::path> write_results(const RunResult& run, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, auto&& body) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
    body(f);
    if (!f) throw std::runtime_error(fmt::format("write to {} failed", p.string()));
    written.push_back(p);
  };
  emit("results.json", [&](std::ostream& o) { o << results_json(run); });
  emit("dispatch.csv", [&](std::ostream& o) { write_dispatch_csv(o, run); });
  emit("rldc.csv", [&](std::ostream& o) { write_rldc_csv(o, run); });
  emit("cycling.csv", [&](std::ostream& o) { write_cycling_csv(o, run); });
  return written;
}

SweepCsvWriter::SweepCsvWriter(std::ostream& out, const SweepSpec& spec)
    : out_(out), axis_(spec.axis) {
  for (const Technology& t : spec.base.technologies) capacity_columns_.push_back(t.name);
  for (const Storage& st : spec.base.storages) {
    capacity_columns_.push_back(st.name + ".C_in");
    capacity_columns_.push_back(st.name + ".C_out");
    capacity_columns_.push_back(st.name + ".C_l");
  }
  schema_line(out_);
  std::vector<std::string> header = {"axis", "value", "variant", "status", "objective",
                                     "cycling_energy", "cycling_hours", "storage_losses",
                                     "curtailment", "emissions", "indeterminate"};
  for (const std::string& c : capacity_columns_) header.push_back("C[" + c + "]");
  header.push_back("message");
  csv_line(out_, header);
}

void SweepCsvWriter::write(const SweepRow& row) {
  std::vector<std::string> cells = {std::string(to_string(axis_)),
                                    format_number(row.axis_value),
                                    row.variant.label(),
                                    row.status,
                                    format_number(row.objective),
                                    format_number(row.cycling_energy),
                                    std::to_string(row.cycling_hours),
                                    format_number(row.storage_losses),
                                    format_number(row.curtailment),
                                    format_number(row.emissions),
                                    row.indeterminate ? "1" : "0"};
  for (const std::string& c : capacity_columns_) {
    std::string v;
    for (const auto& [name, value] : row.capacities) {
      if (name == c) v = format_number(value);
    }
    cells.push_back(v);
  }
  std::string msg = row.message;
  for (char& ch : msg) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ' ';
  }
  cells.push_back(msg);
  csv_line(out_, cells);
  out_.flush();
}

void write_calibration_csv(std::ostream& out, const CalibrationResult& result) {
  schema_line(out);
  csv_line(out, {"iteration", "phi", "share"});
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    csv_line(out, {std::to_string(i), format_number(result.trace[i].phi),
                   format_number(result.trace[i].share)});
  }
}

void write_separation_csv(std::ostream& out, const FactorSeparation& sep) {
  schema_line(out);
  std::vector<std::string> header = {"quantity"};
  for (const SeparationColumn& c : sep.columns) header.push_back(c.label);
  for (const char* d : {"cycling_effect_zero", "ambition_effect_zero",
                        "cycling_effect_proportionate", "ambition_effect_proportionate"}) {
    header.emplace_back(d);
  }
  csv_line(out, header);
  std::vector<std::string> phis = {"phi"};
  for (const SeparationColumn& c : sep.columns) phis.push_back(format_number(c.phi));
  phis.resize(header.size());
  csv_line(out, phis);
  for (std::size_t q = 0; q < sep.quantities.size(); ++q) {
    std::vector<std::string> row = {sep.quantities[q].name};
    for (double v : sep.quantities[q].values) row.push_back(format_number(v));
    for (double d : sep.deltas[q].second) row.push_back(format_number(d));
    csv_line(out, row);
  }
}

void write_profiles_csv(std::ostream& out, const Profiles& profiles) {
  schema_line(out);
  csv_line(out, {"t", "pv", "wind"});
  for (std::size_t t = 0; t < profiles.pv.size(); ++t) {
    csv_line(out, {std::to_string(t), format_number(profiles.pv[t]),
                   format_number(profiles.wind[t])});
  }
}

std::size_t CsvTable::index(const std::string& column) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return i;
  }
  throw std::out_of_range(fmt::format("no column '{}'", column));
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(',', start);
      cells.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (!header) {
      table.header = std::move(cells);
      header = true;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace usc::io
