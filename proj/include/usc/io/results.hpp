#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "usc/harness/harness.hpp"
#include "usc/model/costs.hpp"

namespace usc::io {

/// Written as the first line `#schema_version=N` of every CSV and as the
/// "schema_version" field of results.json.
inline constexpr int kSchemaVersion = 1;

/// Numbers carry 12 significant digits.
std::string format_number(double v);

/// results.json: status, objective, capacities, generation, shares,
/// emissions, policy multiplier and per-storage metrics including the
/// zero-profit residual. No timestamps, so identical inputs give identical
/// bytes.
std::string results_json(const RunResult& run);

/// t, demand, G[tech]..., CU[renewable]..., in[storage], out[storage],
/// level[storage]..., price, cycling.
void write_dispatch_csv(std::ostream& out, const RunResult& run);
/// rank, raw, after_curtailment, after_storage (each sorted descending).
void write_rldc_csv(std::ostream& out, const RunResult& run);
/// One row per cycling event; header only when there are none.
void write_cycling_csv(std::ostream& out, const RunResult& run);

/// Writes results.json, dispatch.csv, rldc.csv and cycling.csv into dir,
/// creating it when needed. Returns the written paths.
std::vector<std::filesystem::path> write_results(const RunResult& run,
                                                 const std::filesystem::path& dir);

/// sweep.csv writer that can emit rows as they complete. Capacity columns
/// follow the technology and storage names of the base scenario.
class SweepCsvWriter {
 public:
  SweepCsvWriter(std::ostream& out, const SweepSpec& spec);
  void write(const SweepRow& row);

 private:
  std::ostream& out_;
  SweepAxis axis_;
  std::vector<std::string> capacity_columns_;
};

/// Calibration trace: iteration, phi, share.
void write_calibration_csv(std::ostream& out, const CalibrationResult& result);
/// Quantity rows against the five runs, then the four delta columns.
void write_separation_csv(std::ostream& out, const FactorSeparation& sep);
/// t, pv, wind.
void write_profiles_csv(std::ostream& out, const Profiles& profiles);

/// Reads a CSV written by this module: skips '#' lines, splits on commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range when missing.
  std::size_t index(const std::string& column) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace usc::io
