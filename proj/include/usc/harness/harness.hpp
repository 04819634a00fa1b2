#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "usc/analysis/cycling.hpp"
#include "usc/analysis/metrics.hpp"
#include "usc/formulation/build.hpp"
#include "usc/lp/solver.hpp"
#include "usc/model/scenario.hpp"

namespace usc {

/// A (family, SLCR) pair such as 1c.
struct Variant {
  int family = 1;
  Slcr slcr = Slcr::kComplete;

  std::string label() const { return variant_label(family, slcr); }
  friend bool operator==(const Variant&, const Variant&) = default;
};

/// All twelve variants in family-major order: 1a 1b 1c 2a ... 4c.
std::vector<Variant> all_variants();
/// Parses "1c" style labels.
Variant parse_variant(std::string_view label);

/// Everything a single scenario run produces.
struct RunResult {
  Scenario scenario;
  lp::Solution solution;
  VarLayout layout;
  CyclingReport cycling;
  MetricsReport metrics;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct RunOptions {
  lp::SolverOptions solver;
  /// Threshold for simultaneous charging and discharging (MW).
  double cycling_tol = 1e-6;
};

/// Builds, solves and analyses one scenario. Metrics are only filled for an
/// optimal solution. Propagates FormulationError and lp::StalledError.
RunResult run_scenario(const Scenario& s, const RunOptions& options = {});

enum class SweepAxis { kPhi, kEtaRt, kStorageVarCost, kResVarCost, kCurtailmentCost };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);

struct SweepSpec {
  Scenario base;
  SweepAxis axis = SweepAxis::kPhi;
  std::vector<double> grid;
  std::vector<Variant> variants;
};

/// The scenario of one sweep cell: base with the axis value applied and the
/// renewable share policy set to the variant (phi taken from the base policy
/// unless the axis is phi).
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value,
                    const Variant& variant);

struct SweepRow {
  int grid_index = 0;
  int variant_index = 0;
  double axis_value = 0.0;
  Variant variant;
  /// "optimal", "infeasible", "unbounded", "stalled" or "error".
  std::string status;
  std::string message;
  double objective = 0.0;
  double cycling_energy = 0.0;
  int cycling_hours = 0;
  double storage_losses = 0.0;
  double curtailment = 0.0;
  double emissions = 0.0;
  /// Capacity per technology and storage (C_in / C_out / C_l suffixed).
  std::vector<std::pair<std::string, double>> capacities;
  /// Storage is indifferent between curtailment and cycling when both storage
  /// variable costs are zero; such rows carry no cycling signal.
  bool indeterminate = false;
};

struct SweepOptions {
  RunOptions run;
  /// 0: hardware concurrency, capped by USC_LAB_THREADS when set.
  int threads = 0;
  /// Called once per finished row, serialized, in completion order.
  std::function<void(const SweepRow&)> on_row;
};

class SweepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs every (grid value, variant) cell. Rows come back ordered by grid
/// index, then variant index, independent of the execution order. Solver
/// failures become rows with a non-optimal status.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// Worker count honoring USC_LAB_THREADS.
int harness_threads(int requested = 0);

struct CalibrationStep {
  double phi = 0.0;
  double share = 0.0;
};

struct CalibrationResult {
  double phi = 0.0;
  double share = 0.0;
  /// Policy shadow price at the returned phi.
  double mu = 0.0;
  std::vector<CalibrationStep> trace;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finds the phi of the base scenario's complete-SLCR policy whose solution
/// reports `target_share` under the (family, slcr) accounting of
/// `report_as`, to within tol. Bisection on a bracket starting at
/// [max(0, target - 0.1), target], widened in steps of 0.1 when it holds no
/// sign change. Throws CalibrationError when the base policy is not a
/// complete-SLCR renewable share, when no bracket exists, or after
/// max_iterations without convergence.
CalibrationResult calibrate_equivalent_target(const Scenario& base, double target_share,
                                              const Variant& report_as, double tol = 1e-3,
                                              int max_iterations = 30,
                                              const RunOptions& options = {});

struct SeparationColumn {
  std::string label;
  Variant variant;
  double phi = 0.0;
  RunResult run;
};

struct SeparationQuantity {
  std::string name;
  /// One value per column.
  std::vector<double> values;
};

/// Five runs: zero@phi, complete@phi_zero, proportionate@phi,
/// complete@phi_prop, complete@phi, where phi_zero / phi_prop are calibrated
/// so the complete-SLCR run reports phi under zero / proportionate accounting.
/// Comparing columns 1-2 (and 3-4) isolates the cycling effect, columns 2-5
/// (and 4-5) the ambition effect.
struct FactorSeparation {
  std::vector<SeparationColumn> columns;
  std::vector<SeparationQuantity> quantities;
  /// name -> {cycling effect zero, ambition effect zero, cycling effect
  /// proportionate, ambition effect proportionate}.
  std::vector<std::pair<std::string, std::array<double, 4>>> deltas;
};

/// Uses the family of the base renewable share policy (family 1 otherwise).
FactorSeparation factor_separation(const Scenario& base, double phi,
                                   const RunOptions& options = {});

struct OracleResult {
  lp::Status status = lp::Status::kInfeasible;
  double objective = 0.0;
  long pivots = 0;
};

/// Solves a problem with nonnegative columns by a dense two-phase tableau
/// simplex with Bland's rule. Independent of the revised simplex backend.
OracleResult dense_tableau_solve(const lp::LpProblem& p);

/// Objective of a tiny scenario (T <= 12, at most two technologies and one
/// storage) through dense_tableau_solve. Throws std::invalid_argument for
/// larger scenarios.
OracleResult brute_force_oracle(const Scenario& tiny);

}  // namespace usc
