#include "usc/lp/kkt.hpp"

#include <algorithm>
#include <cmath>

namespace usc::lp {

namespace {

// A variable counts as sitting on a bound when within this relative distance.
constexpr double kActiveTol = 1e-9;

bool near(double value, double bound) {
  return std::isfinite(bound) &&
         std::abs(value - bound) <= kActiveTol * (1.0 + std::abs(bound));
}

}  // namespace

KktReport check_kkt(const LpProblem& problem, const Solution& solution,
                    double tol) {
  KktReport rep;
  rep.tol = tol;
  const int n = problem.num_columns();
  const int m = problem.num_rows();
  const auto& x = solution.primal;
  const auto& y = solution.dual;
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != m) {
    throw InvalidProblemError("solution does not match problem dimensions");
  }
  const auto cost = problem.objective();
  const auto lower = problem.lower();
  const auto upper = problem.upper();

  std::vector<double> z(cost.begin(), cost.end());
  std::vector<double> z_mag(n, 0.0);
  double dual_obj = 0.0;

  for (int i = 0; i < m; ++i) {
    const Row& row = problem.row(i);
    double act = 0.0;
    double mag = 1.0 + std::abs(row.rhs);
    for (const Term& t : row.terms) {
      act += t.value * x[t.col];
      mag += std::abs(t.value * x[t.col]);
      z[t.col] -= t.value * y[i];
      z_mag[t.col] += std::abs(t.value * y[i]);
    }
    const double slack = act - row.rhs;
    double viol = 0.0;
    double sign_viol = 0.0;
    switch (row.sense) {
      case Sense::kGreaterEqual:
        viol = std::max(0.0, -slack);
        sign_viol = std::max(0.0, -y[i]);
        break;
      case Sense::kLessEqual:
        viol = std::max(0.0, slack);
        sign_viol = std::max(0.0, y[i]);
        break;
      case Sense::kEqual:
        viol = std::abs(slack);
        break;
    }
    rep.primal_feas = std::max(rep.primal_feas, viol / mag);
    rep.dual_feas = std::max(rep.dual_feas, sign_viol);
    if (row.sense != Sense::kEqual && y[i] != 0.0) {
      rep.comp_slack =
          std::max(rep.comp_slack, std::min(std::abs(y[i]), std::abs(slack) / mag));
    }
    dual_obj += row.rhs * y[i];
  }

  for (int j = 0; j < n; ++j) {
    const double lo_viol = std::isfinite(lower[j]) ? lower[j] - x[j] : 0.0;
    const double up_viol = std::isfinite(upper[j]) ? x[j] - upper[j] : 0.0;
    if (lo_viol > 0.0) {
      rep.primal_feas =
          std::max(rep.primal_feas, lo_viol / (1.0 + std::abs(lower[j])));
    }
    if (up_viol > 0.0) {
      rep.primal_feas =
          std::max(rep.primal_feas, up_viol / (1.0 + std::abs(upper[j])));
    }
    const bool at_lo = near(x[j], lower[j]);
    const bool at_up = near(x[j], upper[j]);
    if (!at_lo && !at_up) {
      rep.stationarity = std::max(rep.stationarity, std::abs(z[j]));
    } else if (at_lo && !at_up) {
      rep.dual_feas = std::max(rep.dual_feas, std::max(0.0, -z[j]));
    } else if (at_up && !at_lo) {
      rep.dual_feas = std::max(rep.dual_feas, std::max(0.0, z[j]));
    }
    // Complementarity of the bound multiplier that z implies.
    if (z[j] > 0.0) {
      const double gap = std::isfinite(lower[j])
                             ? std::abs(x[j] - lower[j]) / (1.0 + std::abs(lower[j]))
                             : kInf;
      rep.comp_slack = std::max(rep.comp_slack, std::min(z[j], gap));
      dual_obj += z[j] * (std::isfinite(lower[j]) ? lower[j] : x[j]);
    } else if (z[j] < 0.0) {
      const double gap = std::isfinite(upper[j])
                             ? std::abs(upper[j] - x[j]) / (1.0 + std::abs(upper[j]))
                             : kInf;
      rep.comp_slack = std::max(rep.comp_slack, std::min(-z[j], gap));
      dual_obj += z[j] * (std::isfinite(upper[j]) ? upper[j] : x[j]);
    }
  }
  const double obj = problem.objective_value(x);
  rep.duality_gap = std::abs(obj - dual_obj) / (1.0 + std::abs(obj));
  return rep;
}

}  // namespace usc::lp
