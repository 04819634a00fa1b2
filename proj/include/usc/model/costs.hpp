#pragma once

#include <cstdint>
#include <vector>

#include "usc/model/scenario.hpp"

namespace usc {

/// Annualized cost per MW-year of an investment quoted per kW:
/// 1000 * (overnight * annuity_factor + fixed_om), where the annuity factor is
/// rate / (1 - (1 + rate)^-lifetime), or 1 / lifetime when rate is zero.
/// Throws std::invalid_argument for lifetime < 1 or a negative rate.
double annualize(double overnight, double lifetime, double rate,
                 double fixed_om);

double annuity_factor(double lifetime, double rate);

struct Profiles {
  std::vector<double> pv;
  std::vector<double> wind;
};

/// Synthetic hourly availability series. PV is a clipped half-sine between
/// 06:00 and 18:00 with a random daily amplitude; wind is a mean-reverting
/// AR(1) process clipped to [0, 1]. Deterministic in (seed, horizon).
/// Throws std::invalid_argument for horizon < 24.
Profiles synth_profiles(std::uint64_t seed, int horizon);

/// Hourly demand totalling annual_twh scaled by horizon / 8760, flat with a
/// diurnal ripple (evening peak, night trough).
std::vector<double> default_demand(int horizon, double annual_twh = 520.0);

/// Cost and technical assumptions used to assemble the default scenario.
struct DefaultAssumptions {
  double rate = 0.04;
  double coal_lifetime = 40.0;
  double ocgt_lifetime = 30.0;
  double pv_lifetime = 25.0;
  double wind_lifetime = 25.0;
  double storage_lifetime = 50.0;
  double round_trip = 0.8;
  double annual_demand_twh = 520.0;
};

/// Coal, OCGT, PV, wind and one storage at the reference cost assumptions,
/// synthetic profiles, policy none.
Scenario default_scenario(int horizon = 672, std::uint64_t seed = 42,
                          const DefaultAssumptions& a = {});

}  // namespace usc
