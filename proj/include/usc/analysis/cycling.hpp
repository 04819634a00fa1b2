#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "usc/formulation/build.hpp"
#include "usc/lp/solver.hpp"
#include "usc/model/scenario.hpp"

namespace usc {

enum class CyclingType : std::uint8_t {
  kNone = 0,
  /// Charge equals discharge.
  kEqual = 1,
  /// Discharge exceeds charge.
  kDischargeDominant = 2,
  /// Charge exceeds discharge, discharge exceeds the charge after losses.
  kChargeDominantHigh = 3,
  /// Charge exceeds discharge, discharge at most the charge after losses.
  kChargeDominantLow = 4,
};

/// Split of one (storage, hour) with simultaneous charging c and
/// discharging d into unintended cycling and intended storage use, for a
/// round-trip efficiency eta:
///
///   U   = min(c, d)                    unintended discharge
///   s   = min(eta c, d)
///   spc = s / eta                      same-period cycling
///   apc = (U - s) / eta                across-period cycling
///   losses = U (1 / eta - 1)
///   intended charge    = c - spc
///   intended discharge = d - U
struct CyclingEvent {
  int storage = 0;
  int hour = 0;
  double charge = 0.0;
  double discharge = 0.0;
  CyclingType type = CyclingType::kNone;
  double spc = 0.0;
  double apc = 0.0;
  double unintended_discharge = 0.0;
  double unintended_losses = 0.0;
  double intended_charge = 0.0;
  double intended_discharge = 0.0;

  /// spc + apc + unintended discharge.
  double unintended_use() const { return spc + apc + unintended_discharge; }
};

/// Throws std::invalid_argument for eta outside (0, 1] or negative flows.
/// min(c, d) <= tol yields type kNone with all cycling fields zero.
CyclingEvent decompose_cycling(double charge, double discharge, double eta_rt,
                               double tol = 1e-6);

struct CyclingReport {
  std::vector<CyclingEvent> events;
  double total_spc = 0.0;
  double total_apc = 0.0;
  double total_unintended_discharge = 0.0;
  double total_losses = 0.0;
  /// Distinct hours with at least one event.
  int hours = 0;
  /// Events per type, indexed 1..4.
  std::array<int, 5> type_counts{};
  /// Per-hour flag over the horizon.
  std::vector<bool> cycling_hour;

  double total_unintended_use() const {
    return total_spc + total_apc + total_unintended_discharge;
  }
};

CyclingReport detect_cycling(const lp::Solution& sol, const VarLayout& layout,
                             const std::vector<Storage>& storages,
                             double tol = 1e-6);

}  // namespace usc
