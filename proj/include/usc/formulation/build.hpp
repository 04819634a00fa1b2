#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "usc/lp/problem.hpp"
#include "usc/lp/solver.hpp"
#include "usc/model/scenario.hpp"

namespace usc {

struct TechColumns {
  std::string name;
  bool renewable = false;
  int capacity = -1;
  std::vector<int> gen;
  /// Empty for conventional technologies.
  std::vector<int> curtail;
  /// Availability rows (renewables) or capacity rows (conventional), per hour.
  std::vector<int> limit_rows;
};

struct StorageColumns {
  std::string name;
  int cap_in = -1;
  int cap_out = -1;
  int cap_level = -1;
  std::vector<int> g_in;
  std::vector<int> g_out;
  std::vector<int> level;
  std::vector<int> cap_in_rows;
  std::vector<int> cap_out_rows;
  std::vector<int> cap_level_rows;
  std::vector<int> level_rows;
};

/// Column and row ids of every semantic variable and constraint of a built
/// model.
struct VarLayout {
  int horizon = 0;
  std::vector<TechColumns> techs;
  std::vector<StorageColumns> storages;
  std::vector<int> balance_rows;
  /// Renewable share, potential share or carbon cap row, when present.
  std::optional<int> policy_row;
  /// Capacity target rows keyed by technology name.
  std::vector<std::pair<std::string, int>> target_rows;

  int num_columns() const;
  const TechColumns& tech(const std::string& name) const;
};

struct PolicyRow {
  std::vector<lp::Term> terms;
  lp::Sense sense = lp::Sense::kGreaterEqual;
  double rhs = 0.0;
};

class FormulationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Builds the dispatch and capacity expansion LP of a scenario, including the
/// policy constraint it specifies. Throws FormulationError when the scenario
/// fails validation.
std::pair<lp::LpProblem, VarLayout> build_lp(const Scenario& s);

/// Renewable share row of one of the twelve (family, SLCR) variants with
/// every variable on the left-hand side. Families 1 and 2 produce >= rows
/// (minimum renewable share), families 3 and 4 produce <= rows (maximum
/// conventional share). With R, C the renewable / conventional generation,
/// G = R + C, D the total demand and L = sum(G_in - G_out):
///
///   1a  R            >= phi D          3a  C - L            <= (1-phi) D
///   1b  R - phi L    >= phi D          3b  C - (1-phi) L    <= (1-phi) D
///   1c  R - L        >= phi D          3c  C                <= (1-phi) D
///   2a  R - phi G + phi L        >= 0  4a  C - (1-phi) G - phi L     <= 0
///   2b  R - phi G                >= 0  4b  C - (1-phi) G             <= 0
///   2c  R - phi G - (1-phi) L    >= 0  4c  C - (1-phi) G + (1-phi) L <= 0
///
/// Throws FormulationError for phi outside [0, 1] or a family outside 1..4.
PolicyRow policy_row(int family, Slcr slcr, double phi, const VarLayout& layout,
                     const std::vector<double>& demand);

/// sum over renewables of (sum_t availability) * C_s >= phi * sum(demand).
PolicyRow potential_share_row(double phi, const VarLayout& layout,
                              const Scenario& s);

/// One row C_s >= target per entry. Throws FormulationError for unknown or
/// conventional technologies.
std::vector<std::pair<std::string, PolicyRow>> capacity_target_rows(
    const std::map<std::string, double>& targets, const VarLayout& layout);

/// sum e_s G_{s,t} <= cap, or nullopt when the cap is infinite.
std::optional<PolicyRow> carbon_cap_row(double cap, const VarLayout& layout,
                                        const Scenario& s);

/// Variable cost of each technology including a carbon price.
std::vector<double> effective_variable_costs(const Scenario& s);

/// Coefficient k of the storage loss term in the zero-profit condition
/// LCOS + k * mu * NSL = MV of each variant; equals the coefficient with which
/// L enters the policy row written as h(x) >= 0, negated.
double loss_coverage_factor(int family, Slcr slcr, double phi);

/// Nonnegative shadow price of the renewable share row: the row dual for
/// families 1/2 and its negation for families 3/4. Zero when the scenario has
/// no policy row.
double policy_multiplier(const lp::Solution& sol, const VarLayout& layout,
                         const PolicySpec& policy);

}  // namespace usc
