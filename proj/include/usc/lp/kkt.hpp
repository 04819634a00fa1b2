#pragma once

#include "usc/lp/problem.hpp"
#include "usc/lp/solver.hpp"

namespace usc::lp {

/// Max-norm violations of the four KKT conditions of min c'x over
/// {row_i(x) sense rhs_i, l <= x <= u}, evaluated from (primal, dual) alone.
/// The bound multipliers are implied: z = c - A'y.
///
///   stationarity  max |z_j| over columns strictly inside their bounds (absolute)
///   primal_feas   row and bound violations, each relative to the size of the
///                 terms involved (1 + |rhs| + sum |a_ij x_j|)
///   dual_feas     sign violations of y (by row sense) and of z (by active
///                 bound), absolute
///   comp_slack    min(|multiplier|, relative slack) over inequality rows and
///                 bounds with a nonzero multiplier
///   duality_gap   |c'x - (b'y + bound terms)| / (1 + |c'x|)
struct KktReport {
  double stationarity = 0.0;
  double primal_feas = 0.0;
  double dual_feas = 0.0;
  double comp_slack = 0.0;
  double duality_gap = 0.0;
  double tol = 0.0;

  bool passed() const {
    return stationarity <= tol && primal_feas <= tol && dual_feas <= tol &&
           comp_slack <= tol;
  }
};

KktReport check_kkt(const LpProblem& problem, const Solution& solution,
                    double tol = 1e-6);

}  // namespace usc::lp
