#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "usc/lp/problem.hpp"

namespace usc::lp {

enum class Status : std::uint8_t { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(Status status);

/// Primal/dual result of a solve.
///
/// Sign convention (minimization): `dual[i]` is d(objective)/d(rhs_i), so it is
/// >= 0 on binding >=-rows and <= 0 on binding <=-rows. `reduced_costs[j]` is
/// c_j - a_j'dual, >= 0 at a lower bound and <= 0 at an upper bound.
struct Solution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> dual;
  std::vector<double> reduced_costs;
  long iterations = 0;

  bool optimal() const { return status == Status::kOptimal; }
};

struct SolverOptions {
  /// Relative primal feasibility tolerance (scaled by 1 + |bound|).
  double feas_tol = 1e-7;
  /// Dual feasibility tolerance on the internally scaled costs.
  double opt_tol = 1e-8;
  /// 0 means 50 * (rows + columns) + 10000.
  long max_iterations = 0;
  /// Pivots between fresh LU factorizations of the basis.
  int refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degeneracy_threshold = 200;
  bool scale = true;
  /// Deterministic cost perturbation against dual degeneracy; removed before
  /// the final (primal) cleanup so the returned solution is for the true costs.
  bool perturb_costs = true;
};

/// Thrown when the pivot sequence stalls past the iteration cap even after
/// falling back to Bland's rule.
class StalledError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pluggable LP engine. The embedded revised simplex is the reference backend.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string_view name() const = 0;
  virtual Solution solve(const LpProblem& problem,
                         const SolverOptions& options) const = 0;
};

class SimplexBackend final : public SolverBackend {
 public:
  std::string_view name() const override { return "revised-simplex"; }
  Solution solve(const LpProblem& problem,
                 const SolverOptions& options) const override;
};

const SolverBackend& default_backend();

Solution solve(const LpProblem& problem, double feas_tol = 1e-7,
               double opt_tol = 1e-8);
Solution solve(const LpProblem& problem, const SolverOptions& options);

}  // namespace usc::lp
