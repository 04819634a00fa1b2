#include "usc/analysis/cycling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace usc {

CyclingEvent decompose_cycling(double charge, double discharge, double eta_rt,
                               double tol) {
  if (!(eta_rt > 0.0 && eta_rt <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("round-trip efficiency {} outside (0, 1]", eta_rt));
  }
  if (!(charge >= 0.0) || !(discharge >= 0.0)) {
    throw std::invalid_argument("charge and discharge must be nonnegative");
  }
  CyclingEvent ev;
  ev.charge = charge;
  ev.discharge = discharge;
  const double u = std::min(charge, discharge);
  if (u <= tol) {
    ev.intended_charge = charge;
    ev.intended_discharge = discharge;
    return ev;
  }
  const double s = std::min(eta_rt * charge, discharge);
  ev.spc = s / eta_rt;
  ev.apc = (u - s) / eta_rt;
  ev.unintended_discharge = u;
  ev.unintended_losses = u * (1.0 / eta_rt - 1.0);
  ev.intended_charge = charge - ev.spc;
  ev.intended_discharge = discharge - u;

  // Ties resolve to the lower type number.
  if (std::abs(charge - discharge) <= tol) {
    ev.type = CyclingType::kEqual;
  } else if (discharge > charge) {
    ev.type = CyclingType::kDischargeDominant;
  } else if (discharge >= eta_rt * charge - tol) {
    ev.type = CyclingType::kChargeDominantHigh;
  } else {
    ev.type = CyclingType::kChargeDominantLow;
  }
  return ev;
}

CyclingReport detect_cycling(const lp::Solution& sol, const VarLayout& layout,
                             const std::vector<Storage>& storages, double tol) {
  CyclingReport rep;
  rep.cycling_hour.assign(layout.horizon, false);
  for (std::size_t r = 0; r < layout.storages.size(); ++r) {
    const StorageColumns& sc = layout.storages[r];
    const double eta = storages.at(r).round_trip();
    for (int t = 0; t < layout.horizon; ++t) {
      // Round-off can leave values a hair below zero.
      const double c = std::max(0.0, sol.primal[sc.g_in[t]]);
      const double d = std::max(0.0, sol.primal[sc.g_out[t]]);
      if (std::min(c, d) <= tol) continue;
      CyclingEvent ev = decompose_cycling(c, d, eta, tol);
      ev.storage = static_cast<int>(r);
      ev.hour = t;
      rep.total_spc += ev.spc;
      rep.total_apc += ev.apc;
      rep.total_unintended_discharge += ev.unintended_discharge;
      rep.total_losses += ev.unintended_losses;
      ++rep.type_counts[static_cast<int>(ev.type)];
      rep.cycling_hour[t] = true;
      rep.events.push_back(ev);
    }
  }
  rep.hours = static_cast<int>(
      std::count(rep.cycling_hour.begin(), rep.cycling_hour.end(), true));
  return rep;
}

}  // namespace usc
