#include "usc/lp/problem.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace usc::lp {

std::string_view to_string(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kEqual:
      return "=";
    case Sense::kGreaterEqual:
      return ">=";
  }
  return "?";
}

void VarIndex::add_column(int id, std::string name) {
  if (id != static_cast<int>(column_names_.size())) {
    throw InvalidProblemError("columns must be registered in order");
  }
  auto [it, inserted] = column_ids_.emplace(name, id);
  if (!inserted) {
    throw InvalidProblemError(fmt::format("duplicate column name '{}'", name));
  }
  column_names_.push_back(std::move(name));
}

void VarIndex::add_row(int id, std::string name) {
  if (id != static_cast<int>(row_names_.size())) {
    throw InvalidProblemError("rows must be registered in order");
  }
  auto [it, inserted] = row_ids_.emplace(name, id);
  if (!inserted) {
    throw InvalidProblemError(fmt::format("duplicate row name '{}'", name));
  }
  row_names_.push_back(std::move(name));
}

std::optional<int> VarIndex::column(std::string_view name) const {
  auto it = column_ids_.find(std::string(name));
  if (it == column_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> VarIndex::row(std::string_view name) const {
  auto it = row_ids_.find(std::string(name));
  if (it == row_ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<Term> canonicalize(std::vector<Term> terms) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.col < b.col; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const Term& t : terms) {
    if (!out.empty() && out.back().col == t.col) {
      out.back().value += t.value;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Term& t) { return t.value == 0.0; });
  return out;
}

int LpProblem::add_column(std::string name, double cost, double lower,
                          double upper) {
  const int id = num_columns();
  names_.add_column(id, std::move(name));
  objective_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return id;
}

int LpProblem::add_row(std::string name, std::vector<Term> terms, Sense sense,
                       double rhs) {
  const int id = num_rows();
  names_.add_row(id, std::move(name));
  rows_.push_back(Row{canonicalize(std::move(terms)), sense, rhs});
  return id;
}

void LpProblem::set_bounds(int col, double lower, double upper) {
  lower_.at(col) = lower;
  upper_.at(col) = upper;
}

std::size_t LpProblem::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const Row& r : rows_) nnz += r.terms.size();
  return nnz;
}

void LpProblem::validate() const {
  const int n = num_columns();
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) ||
        lower_[j] > upper_[j] || lower_[j] == kInf || upper_[j] == -kInf) {
      throw InvalidProblemError(fmt::format(
          "column '{}' has invalid bounds [{}, {}]", names_.column_name(j),
          lower_[j], upper_[j]));
    }
    if (!std::isfinite(objective_[j])) {
      throw InvalidProblemError(fmt::format(
          "column '{}' has non-finite cost", names_.column_name(j)));
    }
  }
  for (int i = 0; i < num_rows(); ++i) {
    const Row& r = rows_[i];
    if (!std::isfinite(r.rhs)) {
      throw InvalidProblemError(
          fmt::format("row '{}' has non-finite rhs", names_.row_name(i)));
    }
    for (const Term& t : r.terms) {
      if (t.col < 0 || t.col >= n) {
        throw InvalidProblemError(fmt::format(
            "row '{}' references column {} (have {})", names_.row_name(i),
            t.col, n));
      }
      if (!std::isfinite(t.value)) {
        throw InvalidProblemError(fmt::format(
            "row '{}' has a non-finite coefficient", names_.row_name(i)));
      }
    }
  }
}

std::vector<double> LpProblem::row_activity(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_columns()) {
    throw InvalidProblemError("primal vector has wrong dimension");
  }
  std::vector<double> act(rows_.size(), 0.0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double s = 0.0;
    for (const Term& t : rows_[i].terms) s += t.value * x[t.col];
    act[i] = s;
  }
  return act;
}

double LpProblem::objective_value(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < objective_.size(); ++j) {
    if (objective_[j] != 0.0) s += objective_[j] * x[j];
  }
  return s;
}

}  // namespace usc::lp
