#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace usc::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { kLessEqual, kEqual, kGreaterEqual };

std::string_view to_string(Sense sense);

struct Term {
  int col = 0;
  double value = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::kGreaterEqual;
  double rhs = 0.0;
};

/// Bidirectional map between semantic names ("G[wind][17]") and column or row
/// ids. Names are unique within their kind.
class VarIndex {
 public:
  void add_column(int id, std::string name);
  void add_row(int id, std::string name);

  std::optional<int> column(std::string_view name) const;
  std::optional<int> row(std::string_view name) const;
  const std::string& column_name(int id) const { return column_names_.at(id); }
  const std::string& row_name(int id) const { return row_names_.at(id); }

  std::size_t num_columns() const { return column_names_.size(); }
  std::size_t num_rows() const { return row_names_.size(); }

 private:
  std::vector<std::string> column_names_;
  std::vector<std::string> row_names_;
  std::unordered_map<std::string, int> column_ids_;
  std::unordered_map<std::string, int> row_ids_;
};

class InvalidProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Minimization LP: min c'x  s.t.  row_i(x) {<=,=,>=} rhs_i,  lower <= x <= upper.
///
/// Rows may carry duplicate column references while being assembled; `add_row`
/// merges them and drops exact zeros so that two algebraically identical rows
/// compare equal term by term.
class LpProblem {
 public:
  int add_column(std::string name, double cost = 0.0, double lower = 0.0,
                 double upper = kInf);
  int add_row(std::string name, std::vector<Term> terms, Sense sense,
              double rhs);

  void set_cost(int col, double cost) { objective_.at(col) = cost; }
  void set_bounds(int col, double lower, double upper);

  int num_columns() const { return static_cast<int>(objective_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  std::size_t num_nonzeros() const;

  std::span<const double> objective() const { return objective_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  const Row& row(int i) const { return rows_.at(i); }
  std::span<const Row> rows() const { return rows_; }
  const VarIndex& names() const { return names_; }

  /// Throws InvalidProblemError on a dangling column reference, a non-finite
  /// rhs or coefficient, or lower > upper.
  void validate() const;

  /// Row activity a_i'x for every row.
  std::vector<double> row_activity(std::span<const double> x) const;
  double objective_value(std::span<const double> x) const;

 private:
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Row> rows_;
  VarIndex names_;
};

/// Sorts terms by column, sums duplicates and removes exact zeros.
std::vector<Term> canonicalize(std::vector<Term> terms);

}  // namespace usc::lp
