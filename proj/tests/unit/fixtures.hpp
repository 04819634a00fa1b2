#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "usc/model/scenario.hpp"

namespace usc::testkit {

/// One conventional plant, one renewable and one storage over T hours.
/// Capacity costs are charged in full (hours_per_year = horizon).
inline Scenario small_scenario(int T, double rt = 0.8) {
  Scenario s;
  s.horizon = T;
  s.hours_per_year = T;
  s.demand.assign(T, 100.0);
  Technology gas;
  gas.name = "gas";
  gas.capacity_cost = 40.0;
  gas.variable_cost = 50.0;
  gas.availability.assign(T, 1.0);
  gas.emission_factor = 0.4;
  Technology vre;
  vre.name = "vre";
  vre.tech_class = TechClass::kRenewable;
  vre.capacity_cost = 30.0;
  for (int t = 0; t < T; ++t) vre.availability.push_back(t % 2 == 0 ? 0.9 : 0.1);
  s.technologies = {gas, vre};
  Storage st;
  st.name = "store";
  st.charge_cost = 2.0;
  st.discharge_cost = 2.0;
  st.energy_cost = 1.0;
  st.var_charge_cost = 0.5;
  st.var_discharge_cost = 0.5;
  st.eta_in = st.eta_out = std::sqrt(rt);
  s.storages = {st};
  return s;
}

/// Random tiny instance for oracle comparisons.
inline Scenario random_tiny(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int T = 2 + static_cast<int>(rng() % 11);
  Scenario s = small_scenario(T, 0.5 + 0.5 * u(rng));
  for (double& d : s.demand) d = 50.0 + 100.0 * u(rng);
  s.technologies[0].capacity_cost = 20.0 + 60.0 * u(rng);
  s.technologies[0].variable_cost = 10.0 + 80.0 * u(rng);
  s.technologies[1].capacity_cost = 10.0 + 60.0 * u(rng);
  s.technologies[1].curtailment_cost = rng() % 2 ? 0.0 : 5.0 * u(rng);
  for (double& a : s.technologies[1].availability) a = u(rng);
  Storage& st = s.storages[0];
  st.charge_cost = 5.0 * u(rng);
  st.discharge_cost = 5.0 * u(rng);
  st.energy_cost = 10.0 * u(rng);
  st.var_charge_cost = u(rng);
  st.var_discharge_cost = u(rng);
  st.self_discharge = 0.95 + 0.05 * u(rng);
  if (rng() % 4 == 0) s.storages.clear();
  s.wrap_storage_level = rng() % 2 == 0;
  const int family = 1 + static_cast<int>(rng() % 4);
  const auto slcr = static_cast<Slcr>(rng() % 3);
  s.policy = PolicySpec::renewable_share(family, slcr, 0.9 * u(rng));
  return s;
}

}  // namespace usc::testkit
