#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "usc/harness/harness.hpp"

namespace usc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool storage_indifferent(const Scenario& s) {
  if (s.storages.empty()) return false;
  return std::all_of(s.storages.begin(), s.storages.end(), [](const Storage& st) {
    return st.var_charge_cost == 0.0 && st.var_discharge_cost == 0.0;
  });
}

SweepRow evaluate_cell(const SweepSpec& spec, int gi, int vi, const RunOptions& options) {
  SweepRow row;
  row.grid_index = gi;
  row.variant_index = vi;
  row.axis_value = spec.grid[gi];
  row.variant = spec.variants[vi];
  try {
    const Scenario s = apply_axis(spec.base, spec.axis, row.axis_value, row.variant);
    row.indeterminate = storage_indifferent(s);
    const RunResult run = run_scenario(s, options);
    row.status = std::string(lp::to_string(run.solution.status));
    if (!run.solution.optimal()) return row;
    const auto& x = run.solution.primal;
    row.objective = run.solution.objective;
    row.cycling_energy = run.cycling.total_unintended_use();
    row.cycling_hours = run.cycling.hours;
    row.storage_losses = run.metrics.totals.storage_losses();
    row.curtailment = run.metrics.totals.curtailment;
    row.emissions = run.metrics.emissions;
    for (const TechColumns& tc : run.layout.techs) {
      row.capacities.emplace_back(tc.name, x[tc.capacity]);
    }
    for (const StorageColumns& sc : run.layout.storages) {
      row.capacities.emplace_back(sc.name + ".C_in", x[sc.cap_in]);
      row.capacities.emplace_back(sc.name + ".C_out", x[sc.cap_out]);
      row.capacities.emplace_back(sc.name + ".C_l", x[sc.cap_level]);
    }
  } catch (const lp::StalledError& e) {
    row.status = "stalled";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  return row;
}

}  // namespace

std::vector<Variant> all_variants() {
  std::vector<Variant> out;
  for (int family = 1; family <= 4; ++family) {
    for (Slcr slcr : {Slcr::kZero, Slcr::kProportionate, Slcr::kComplete}) {
      out.push_back({family, slcr});
    }
  }
  return out;
}

Variant parse_variant(std::string_view label) {
  if (label.size() != 2 || label[0] < '1' || label[0] > '4') {
    throw std::invalid_argument(fmt::format("variant '{}' is not of the form 1a..4c", label));
  }
  return {label[0] - '0', parse_slcr(label.substr(1))};
}

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
  RunResult r;
  r.scenario = s;
  auto start = std::chrono::steady_clock::now();
  auto [problem, layout] = build_lp(s);
  r.layout = std::move(layout);
  r.build_seconds = seconds_since(start);
  start = std::chrono::steady_clock::now();
  r.solution = lp::solve(problem, options.solver);
  r.solve_seconds = seconds_since(start);
  if (r.solution.optimal()) {
    r.cycling = detect_cycling(r.solution, r.layout, s.storages, options.cycling_tol);
    r.metrics = compute_metrics(s, r.solution, r.layout, r.cycling);
  }
  return r;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kPhi: return "phi";
    case SweepAxis::kEtaRt: return "eta_rt";
    case SweepAxis::kStorageVarCost: return "storage_var_cost";
    case SweepAxis::kResVarCost: return "res_var_cost";
    case SweepAxis::kCurtailmentCost: return "curtailment_cost";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  for (SweepAxis a : {SweepAxis::kPhi, SweepAxis::kEtaRt, SweepAxis::kStorageVarCost,
                      SweepAxis::kResVarCost, SweepAxis::kCurtailmentCost}) {
    if (to_string(a) == text) return a;
  }
  throw SweepError(fmt::format("unknown sweep axis '{}'", text));
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value,
                    const Variant& variant) {
  Scenario s = base;
  const double phi = axis == SweepAxis::kPhi ? value : base.policy.phi;
  s.policy = PolicySpec::renewable_share(variant.family, variant.slcr, phi);
  switch (axis) {
    case SweepAxis::kPhi:
      break;
    case SweepAxis::kEtaRt:
      if (!(value > 0.0)) throw SweepError("round-trip efficiency must be positive");
      for (Storage& st : s.storages) st.eta_in = st.eta_out = std::sqrt(value);
      break;
    case SweepAxis::kStorageVarCost:
      for (Storage& st : s.storages) st.var_charge_cost = st.var_discharge_cost = value;
      break;
    case SweepAxis::kResVarCost:
      for (Technology& t : s.technologies) {
        if (t.renewable()) t.variable_cost = value;
      }
      break;
    case SweepAxis::kCurtailmentCost:
      for (Technology& t : s.technologies) {
        if (t.renewable()) t.curtailment_cost = value;
      }
      break;
  }
  return s;
}

int harness_threads(int requested) {
  int n = requested > 0 ? requested
                        : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("USC_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  if (spec.grid.empty()) throw SweepError("sweep grid is empty");
  if (spec.variants.empty()) throw SweepError("sweep needs at least one variant");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) {
      throw SweepError(fmt::format("sweep grid not strictly increasing at index {}", i));
    }
  }

  const int nv = static_cast<int>(spec.variants.size());
  const int cells = static_cast<int>(spec.grid.size()) * nv;
  std::vector<SweepRow> rows(cells);
  std::atomic<int> next{0};
  std::mutex sink;

  auto worker = [&] {
    for (int i = next++; i < cells; i = next++) {
      rows[i] = evaluate_cell(spec, i / nv, i % nv, options.run);
      if (options.on_row) {
        std::lock_guard lock(sink);
        options.on_row(rows[i]);
      }
    }
  };

  const int threads = std::min(harness_threads(options.threads), cells);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  return rows;
}

}  // namespace usc
