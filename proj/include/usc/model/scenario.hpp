#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace usc {

enum class TechClass : std::uint8_t { kRenewable, kConventional };

struct Technology {
  std::string name;
  TechClass tech_class = TechClass::kConventional;
  /// Annualized capacity cost including fixed O&M, currency/MW-year.
  double capacity_cost = 0.0;
  /// currency/MWh generated.
  double variable_cost = 0.0;
  /// Hourly availability factor in [0, 1]; all ones for conventional plants.
  std::vector<double> availability;
  /// currency/MWh curtailed (renewables only).
  double curtailment_cost = 0.0;
  /// tCO2/MWh.
  double emission_factor = 0.0;

  bool renewable() const { return tech_class == TechClass::kRenewable; }
};

struct Storage {
  std::string name;
  /// Annualized costs: charge/discharge power in currency/MW-year, energy in
  /// currency/MWh-year.
  double charge_cost = 0.0;
  double discharge_cost = 0.0;
  double energy_cost = 0.0;
  double var_charge_cost = 0.0;
  double var_discharge_cost = 0.0;
  double eta_in = 1.0;
  double eta_out = 1.0;
  /// Fraction of the level retained from one hour to the next.
  double self_discharge = 1.0;

  double round_trip() const { return eta_in * eta_out; }
};

enum class PolicyKind : std::uint8_t {
  kNone,
  kRenewableShare,
  kPotentialShare,
  kCapacityTarget,
  kCarbonCap,
  kCarbonPrice,
};

/// Storage loss coverage by renewables.
enum class Slcr : std::uint8_t { kZero, kProportionate, kComplete };

struct PolicySpec {
  PolicyKind kind = PolicyKind::kNone;
  /// 1: min renewable share of demand, 2: min renewable share of generation,
  /// 3: max conventional share of demand, 4: max conventional share of
  /// generation.
  int family = 1;
  Slcr slcr = Slcr::kComplete;
  double phi = 0.0;
  /// tCO2; +inf disables the cap.
  double cap = 0.0;
  /// currency/tCO2.
  double price = 0.0;
  /// MW per renewable technology name.
  std::map<std::string, double> capacity_targets;

  static PolicySpec none() { return {}; }
  static PolicySpec renewable_share(int family, Slcr slcr, double phi) {
    PolicySpec p;
    p.kind = PolicyKind::kRenewableShare;
    p.family = family;
    p.slcr = slcr;
    p.phi = phi;
    return p;
  }
};

struct Scenario {
  int horizon = 0;
  std::vector<double> demand;
  std::vector<Technology> technologies;
  std::vector<Storage> storages;
  PolicySpec policy;
  bool wrap_storage_level = true;
  /// Annualized capacity costs are prorated by horizon / hours_per_year so a
  /// sub-annual horizon carries a matching share of the yearly fixed cost.
  /// Set equal to the horizon to charge full annual costs.
  double hours_per_year = 8760.0;

  double capacity_weight() const { return horizon / hours_per_year; }
};

struct Violation {
  std::string code;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every structural invariant of a scenario. Never throws; an empty
/// result means the scenario is valid.
std::vector<Violation> validate_scenario(const Scenario& s);

std::string_view to_string(TechClass c);
std::string_view to_string(PolicyKind k);
std::string_view to_string(Slcr s);
/// Letter used in variant labels: a (zero), b (proportionate), c (complete).
char slcr_letter(Slcr s);
/// Variant label such as "1c".
std::string variant_label(int family, Slcr slcr);

/// Accepts "zero", "proportionate", "complete" and the letters a/b/c.
Slcr parse_slcr(std::string_view text);
PolicyKind parse_policy_kind(std::string_view text);
TechClass parse_tech_class(std::string_view text);

}  // namespace usc
