#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "usc/model/costs.hpp"

namespace usc {

double annuity_factor(double lifetime, double rate) {
  if (!(lifetime >= 1.0)) {
    throw std::invalid_argument(fmt::format("lifetime {} must be >= 1", lifetime));
  }
  if (!(rate >= 0.0)) {
    throw std::invalid_argument(fmt::format("rate {} must be >= 0", rate));
  }
  if (rate == 0.0) return 1.0 / lifetime;
  return rate / (1.0 - std::pow(1.0 + rate, -lifetime));
}

double annualize(double overnight, double lifetime, double rate,
                 double fixed_om) {
  return 1000.0 * (overnight * annuity_factor(lifetime, rate) + fixed_om);
}

Profiles synth_profiles(std::uint64_t seed, int horizon) {
  if (horizon < 24) {
    throw std::invalid_argument(
        fmt::format("synthetic profiles need horizon >= 24, got {}", horizon));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amplitude(0.1, 0.7);
  std::normal_distribution<double> noise(0.0, 1.0);

  Profiles p;
  p.pv.assign(horizon, 0.0);
  p.wind.assign(horizon, 0.0);

  // Sun above the horizon from 06:00 to 18:00.
  double amp = amplitude(rng);
  for (int t = 0; t < horizon; ++t) {
    const int hour = t % 24;
    if (hour == 0 && t > 0) amp = amplitude(rng);
    if (hour > 6 && hour < 18) {
      const double elevation = std::sin(std::numbers::pi * (hour - 6) / 12.0);
      p.pv[t] = std::clamp(amp * elevation, 0.0, 1.0);
    }
  }

  // AR(1) around a long-run mean with hourly persistence.
  constexpr double kMean = 0.32;
  constexpr double kPersistence = 0.96;
  constexpr double kShock = 0.05;
  double w = kMean;
  for (int t = 0; t < horizon; ++t) {
    w = kMean + kPersistence * (w - kMean) + kShock * noise(rng);
    p.wind[t] = std::clamp(w, 0.0, 1.0);
  }
  return p;
}

std::vector<double> default_demand(int horizon, double annual_twh) {
  std::vector<double> d(horizon);
  for (int t = 0; t < horizon; ++t) {
    // Evening peak at 18:00, trough at 06:00.
    const double phase = 2.0 * std::numbers::pi * ((t % 24) - 12) / 24.0;
    d[t] = 1.0 - 0.15 * std::cos(phase);
  }
  const double target = annual_twh * 1e6 * horizon / 8760.0;  // MWh
  const double sum = std::accumulate(d.begin(), d.end(), 0.0);
  for (double& v : d) v *= target / sum;
  return d;
}

Scenario default_scenario(int horizon, std::uint64_t seed,
                          const DefaultAssumptions& a) {
  const Profiles prof = synth_profiles(seed, horizon);
  const std::vector<double> firm(horizon, 1.0);

  Scenario s;
  s.horizon = horizon;
  s.demand = default_demand(horizon, a.annual_demand_twh);

  Technology coal;
  coal.name = "coal";
  coal.tech_class = TechClass::kConventional;
  coal.capacity_cost = annualize(1300, a.coal_lifetime, a.rate, 25);
  coal.variable_cost = 21.55;
  coal.availability = firm;
  coal.emission_factor = 0.9;

  Technology ocgt;
  ocgt.name = "ocgt";
  ocgt.tech_class = TechClass::kConventional;
  ocgt.capacity_cost = annualize(400, a.ocgt_lifetime, a.rate, 1.5);
  ocgt.variable_cost = 76.34;
  ocgt.availability = firm;
  ocgt.emission_factor = 0.4;

  Technology pv;
  pv.name = "pv";
  pv.tech_class = TechClass::kRenewable;
  pv.capacity_cost = annualize(390, a.pv_lifetime, a.rate, 10.6);
  pv.availability = prof.pv;

  Technology wind;
  wind.name = "wind";
  wind.tech_class = TechClass::kRenewable;
  wind.capacity_cost = annualize(1000, a.wind_lifetime, a.rate, 20);
  wind.availability = prof.wind;

  s.technologies = {coal, ocgt, pv, wind};

  Storage sto;
  sto.name = "storage";
  // Power costs are quoted per kW and year already.
  sto.charge_cost = 1.1 * 1000.0;
  sto.discharge_cost = 1.1 * 1000.0;
  sto.energy_cost = annualize(80, a.storage_lifetime, a.rate, 0);
  sto.var_charge_cost = 0.5;
  sto.var_discharge_cost = 0.5;
  sto.eta_in = std::sqrt(a.round_trip);
  sto.eta_out = std::sqrt(a.round_trip);
  s.storages = {sto};
  return s;
}

}  // namespace usc
