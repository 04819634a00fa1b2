#pragma once

#include <iosfwd>
#include <string>

#include "usc/lp/problem.hpp"

namespace usc::lp {

enum class MpsFormat {
  /// Whitespace-separated fields; semantic row/column names are kept.
  kFree,
  /// Column-positioned fields (2-3, 5-12, 15-22, 25-36, 40-47, 50-61) with
  /// generated 8-character names R0000001 / C0000001.
  kFixed,
};

/// Writes NAME / ROWS / COLUMNS / RHS / BOUNDS / ENDATA. The objective row is
/// named OBJ; bounds equal to the default [0, +inf) are omitted.
void write_mps(const LpProblem& problem, std::ostream& out,
               MpsFormat format = MpsFormat::kFree,
               const std::string& name = "USCLAB");

/// Reads the free-format subset produced by write_mps (N/L/G/E rows;
/// LO/UP/FX/FR/MI/PL bounds; a single RHS vector).
LpProblem read_mps(std::istream& in);

}  // namespace usc::lp
