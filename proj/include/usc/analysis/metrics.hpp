#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usc/analysis/cycling.hpp"
#include "usc/formulation/build.hpp"
#include "usc/lp/solver.hpp"
#include "usc/model/scenario.hpp"

namespace usc {

/// Hourly energy balance duals (currency/MWh).
std::vector<double> energy_prices(const lp::Solution& sol, const VarLayout& layout);

/// Levelized cost of storage r: (capacity costs + variable costs + charging
/// cost at the hourly price) per MWh discharged. nullopt when nothing is
/// discharged.
std::optional<double> lcos(const lp::Solution& sol, const VarLayout& layout,
                           const Scenario& s, int r);

/// Discharge-weighted mean price. nullopt when nothing is discharged.
std::optional<double> market_value(const lp::Solution& sol, const VarLayout& layout,
                                   int r);

/// Conversion losses per MWh discharged: sum(G_in - G_out) / sum(G_out).
std::optional<double> nsl(const lp::Solution& sol, const VarLayout& layout, int r);

/// LCOS + k * mu * NSL - MV for a renewable share policy, with k from
/// loss_coverage_factor and mu from policy_multiplier. For other policies
/// k * mu is taken as zero. nullopt when LCOS or MV is undefined.
std::optional<double> zero_profit_residual(const PolicySpec& policy,
                                           const lp::Solution& sol,
                                           const VarLayout& layout,
                                           const Scenario& s, int r);

struct Rldc {
  std::vector<double> raw;
  std::vector<double> after_curtailment;
  std::vector<double> after_storage;
};

/// Residual load d - sum_R availability * C, then plus curtailment, then plus
/// net storage charging; each sorted in descending order.
Rldc rldc(const lp::Solution& sol, const VarLayout& layout, const Scenario& s);

/// The phi at which the (family, slcr) renewable share row would be exactly
/// binding for this solution. nullopt when the denominator vanishes.
std::optional<double> reported_share(const lp::Solution& sol, const VarLayout& layout,
                                     const Scenario& s, int family, Slcr slcr);

/// sum_s e_s sum_t G_{s,t} in tCO2.
double emissions(const lp::Solution& sol, const VarLayout& layout, const Scenario& s);

struct TaggedPrice {
  int hour = 0;
  double price = 0.0;
  bool cycling = false;
};

std::vector<TaggedPrice> tagged_prices(const lp::Solution& sol, const VarLayout& layout,
                                       const CyclingReport& report);

/// Aggregate energy flows of a solution (MWh over the horizon).
struct EnergyTotals {
  double demand = 0.0;
  double renewable = 0.0;
  double conventional = 0.0;
  double curtailment = 0.0;
  double charge = 0.0;
  double discharge = 0.0;

  double storage_losses() const { return charge - discharge; }
  double generation() const { return renewable + conventional; }
};

EnergyTotals energy_totals(const lp::Solution& sol, const VarLayout& layout,
                           const Scenario& s);

struct StorageMetrics {
  std::string name;
  double cap_in = 0.0;
  double cap_out = 0.0;
  double cap_level = 0.0;
  std::optional<double> lcos;
  std::optional<double> market_value;
  std::optional<double> nsl;
  std::optional<double> zero_profit_residual;
};

struct MetricsReport {
  std::vector<StorageMetrics> storages;
  /// Nonnegative shadow price of the policy row (0 without one).
  double mu_policy = 0.0;
  /// Loss coverage factor k of the active variant (0 for other policies).
  double loss_factor = 0.0;
  Rldc rldc;
  std::optional<double> share_zero;
  std::optional<double> share_proportionate;
  std::optional<double> share_complete;
  double emissions = 0.0;
  EnergyTotals totals;
  std::vector<TaggedPrice> prices;
};

MetricsReport compute_metrics(const Scenario& s, const lp::Solution& sol,
                              const VarLayout& layout, const CyclingReport& cycling);

}  // namespace usc
