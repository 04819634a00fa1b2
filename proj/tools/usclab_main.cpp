#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "usc/harness/harness.hpp"
#include "usc/io/config.hpp"
#include "usc/io/results.hpp"
#include "usc/lp/mps.hpp"
#include "usc/model/costs.hpp"

namespace fs = std::filesystem;
using namespace usc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::string output;
  int horizon = 672;
  std::uint64_t seed = 42;
  std::optional<int> family;
  std::string slcr;
  std::optional<double> phi;
};

void add_common(CLI::App* cmd, Common& c, bool policy_flags) {
  cmd->add_option("-c,--config", c.config, "Scenario config file (INI)")->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", c.output, "Output directory or file");
  cmd->add_option("--horizon", c.horizon, "Hours of the built-in default scenario")
      ->check(CLI::Range(24, 1000000));
  cmd->add_option("--seed", c.seed, "Profile seed of the built-in default scenario");
  if (policy_flags) {
    cmd->add_option("--family", c.family, "Renewable constraint family")->check(CLI::Range(1, 4));
    cmd->add_option("--slcr", c.slcr, "Storage loss coverage: zero|proportionate|complete")
        ->check(CLI::IsMember({"zero", "proportionate", "complete", "a", "b", "c"}));
    cmd->add_option("--phi", c.phi, "Renewable share target")->check(CLI::Range(0.0, 1.0));
  }
}

io::LoadedConfig load(const Common& c) {
  io::LoadedConfig cfg;
  if (!c.config.empty()) {
    cfg = io::load_config(c.config);
  } else {
    cfg.scenario = default_scenario(c.horizon, c.seed);
    cfg.run.seed = c.seed;
  }
  io::PolicyOverrides o;
  o.family = c.family;
  if (!c.slcr.empty()) o.slcr = parse_slcr(c.slcr);
  o.phi = c.phi;
  io::apply_overrides(cfg.scenario, o);
  if (!c.output.empty()) cfg.run.output_dir = c.output;
  if (cfg.sweep) cfg.sweep->base.policy = cfg.scenario.policy;
  return cfg;
}

std::ofstream open_output(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
  return f;
}

int cmd_solve(const Common& c) {
  const io::LoadedConfig cfg = load(c);
  const RunResult run = run_scenario(cfg.scenario, cfg.run.run_options());
  const auto files = io::write_results(run, cfg.run.output_dir);
  if (!run.solution.optimal()) {
    std::cerr << fmt::format("usclab: scenario is {}; see {}\n",
                             lp::to_string(run.solution.status), files.front().string());
    return kExitNoSolution;
  }
  std::cout << fmt::format("objective {}  cycling hours {}  solve {:.2f}s\n",
                           io::format_number(run.solution.objective), run.cycling.hours,
                           run.solve_seconds);
  for (const fs::path& p : files) std::cout << "wrote " << p.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::string& grid,
              const std::string& variants) {
  io::LoadedConfig cfg = load(c);
  SweepSpec spec;
  if (cfg.sweep) spec = *cfg.sweep;
  spec.base = cfg.scenario;
  if (!axis.empty()) spec.axis = parse_sweep_axis(axis);
  if (!grid.empty()) spec.grid = io::parse_grid(grid);
  if (!variants.empty()) {
    spec.variants.clear();
    if (variants == "all") {
      spec.variants = all_variants();
    } else {
      std::size_t start = 0;
      for (;;) {
        const auto pos = variants.find(',', start);
        spec.variants.push_back(parse_variant(variants.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
    }
  }
  if (spec.grid.empty()) throw SweepError("no sweep grid: give --grid or a [sweep] section");
  if (spec.variants.empty()) spec.variants = all_variants();
  if (spec.base.policy.kind != PolicyKind::kRenewableShare) spec.base.policy.phi = 0.8;

  const fs::path out = cfg.run.output_dir / "sweep.csv";
  std::ofstream f = open_output(out);
  io::SweepCsvWriter writer(f, spec);
  SweepOptions opts;
  opts.run = cfg.run.run_options();
  opts.threads = cfg.run.threads;
  // Rows stream in completion order; the file is rewritten in grid order at
  // the end so repeated runs are byte-identical.
  opts.on_row = [&](const SweepRow& row) {
    writer.write(row);
    std::cerr << fmt::format("  {}={} {} {}\n", to_string(spec.axis),
                             io::format_number(row.axis_value), row.variant.label(), row.status);
  };
  const auto rows = run_sweep(spec, opts);
  f.close();
  std::ofstream sorted = open_output(out);
  io::SweepCsvWriter final_writer(sorted, spec);
  bool all_optimal = true;
  for (const SweepRow& row : rows) {
    final_writer.write(row);
    all_optimal = all_optimal && row.status == "optimal";
  }
  std::cout << "wrote " << out.string() << '\n';
  return all_optimal ? kExitOk : kExitNoSolution;
}

int cmd_calibrate(const Common& c, double target, const std::string& report_as, double tol) {
  io::LoadedConfig cfg = load(c);
  Scenario base = cfg.scenario;
  if (base.policy.kind != PolicyKind::kRenewableShare) {
    base.policy = PolicySpec::renewable_share(1, Slcr::kComplete, target);
  }
  base.policy.slcr = Slcr::kComplete;
  const Variant as = parse_variant(report_as);
  const CalibrationResult r =
      calibrate_equivalent_target(base, target, as, tol, 30, cfg.run.run_options());
  const fs::path out = cfg.run.output_dir / "calibration.csv";
  std::ofstream f = open_output(out);
  io::write_calibration_csv(f, r);
  std::cout << fmt::format("phi {} reports {} as {} (mu {}) after {} solves\n",
                           io::format_number(r.phi), io::format_number(r.share), as.label(),
                           io::format_number(r.mu), r.trace.size());
  std::cout << "wrote " << out.string() << '\n';
  return kExitOk;
}

int cmd_separate(const Common& c) {
  io::LoadedConfig cfg = load(c);
  const double phi = c.phi.value_or(cfg.scenario.policy.kind == PolicyKind::kRenewableShare
                                        ? cfg.scenario.policy.phi
                                        : 0.8);
  const FactorSeparation sep = factor_separation(cfg.scenario, phi, cfg.run.run_options());
  const fs::path out = cfg.run.output_dir / "separation.csv";
  std::ofstream f = open_output(out);
  io::write_separation_csv(f, sep);
  std::cout << "wrote " << out.string() << '\n';
  return kExitOk;
}

int cmd_gen_profiles(const Common& c) {
  const fs::path out = c.output.empty() ? fs::path("profiles.csv") : fs::path(c.output);
  std::ofstream f = open_output(out);
  io::write_profiles_csv(f, synth_profiles(c.seed, c.horizon));
  std::cout << "wrote " << out.string() << '\n';
  return kExitOk;
}

int cmd_dump_lp(const Common& c, bool fixed) {
  const io::LoadedConfig cfg = load(c);
  const auto [problem, layout] = build_lp(cfg.scenario);
  const fs::path out = c.output.empty() ? fs::path("model.mps") : fs::path(c.output);
  std::ofstream f = open_output(out);
  lp::write_mps(problem, f, fixed ? lp::MpsFormat::kFixed : lp::MpsFormat::kFree);
  std::cout << fmt::format("wrote {} ({} columns, {} rows)\n", out.string(),
                           problem.num_columns(), problem.num_rows());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity expansion LP lab for storage cycling under renewable targets"};
  app.require_subcommand(1);

  Common solve, sweep, calib, sep, prof, dump;
  auto* s = app.add_subcommand("solve", "Solve one scenario and write results");
  add_common(s, solve, true);

  auto* w = app.add_subcommand("sweep", "Run a parameter sweep to sweep.csv");
  add_common(w, sweep, true);
  std::string axis, grid, variants;
  w->add_option("--axis", axis, "phi|eta_rt|storage_var_cost|res_var_cost|curtailment_cost");
  w->add_option("--grid", grid, "Comma list or start:step:stop");
  w->add_option("--variants", variants, "Comma list such as 1a,1c, or all");

  auto* k = app.add_subcommand("calibrate", "Find the complete-SLCR phi matching a reported share");
  add_common(k, calib, true);
  double target = 0.8, tol = 1e-3;
  std::string report_as = "1b";
  k->add_option("--target", target, "Target share")->check(CLI::Range(0.0, 1.0));
  k->add_option("--report-as", report_as, "Accounting variant of the target, e.g. 1b");
  k->add_option("--tol", tol, "Share tolerance")->check(CLI::PositiveNumber);

  auto* p = app.add_subcommand("separate", "Five-run factor separation at --phi");
  add_common(p, sep, true);

  auto* g = app.add_subcommand("gen-profiles", "Write synthetic PV and wind profiles");
  add_common(g, prof, false);

  auto* d = app.add_subcommand("dump-lp", "Write the scenario LP as MPS");
  add_common(d, dump, true);
  bool fixed = false;
  d->add_flag("--fixed", fixed, "Fixed-column MPS instead of free format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*w) return cmd_sweep(sweep, axis, grid, variants);
    if (*k) return cmd_calibrate(calib, target, report_as, tol);
    if (*p) return cmd_separate(sep);
    if (*g) return cmd_gen_profiles(prof);
    if (*d) return cmd_dump_lp(dump, fixed);
  } catch (const io::ConfigError& e) {
    std::cerr << "usclab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usclab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "usclab: " << e.what() << '\n';
    return kExitNoSolution;
  }
  return kExitUsage;
}
