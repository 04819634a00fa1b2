// Bounded revised simplex (dual and primal) over a sparse column-major copy of
// the problem. Internally every row i gets a logical variable s_i = a_i'x, so
// the working system is [A  -I] (x, s) = 0 with box bounds on all N = n + m
// variables; row senses become bounds on the logicals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <fmt/format.h>

#include "basis_factor.hpp"
#include "usc/lp/solver.hpp"

namespace usc::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
  }
  return "?";
}

namespace {

using detail::BasisFactor;
using detail::SparseColumn;

enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

enum class Outcome : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kSingular,
};

constexpr double kPivotTol = 1e-9;
constexpr double kZeroStep = 1e-12;

double pow2_round(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(v))));
}

/// Deterministic value in [0, 1) derived from an index.
double hash_unit(std::uint64_t j) {
  std::uint64_t z = j + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

class Engine {
 public:
  Engine(const LpProblem& p, const SolverOptions& opt)
      : opt_(opt),
        m_(p.num_rows()),
        n_(p.num_columns()),
        total_(m_ + n_),
        factor_(m_) {
    load(p);
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations
                                       : 50L * (m_ + n_) + 10000;
  }

  Solution run(const LpProblem& p);

 private:
  // ---- setup -------------------------------------------------------------
  void load(const LpProblem& p);
  void compute_scaling();

  // ---- linear algebra helpers ------------------------------------------
  double column_dot(int j, const std::vector<double>& v) const {
    if (j >= n_) return -v[j - n_];
    double s = 0.0;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      s += col_value_[e] * v[col_index_[e]];
    }
    return s;
  }
  void load_column(int j, std::vector<double>& dense) const {
    std::fill(dense.begin(), dense.end(), 0.0);
    if (j >= n_) {
      dense[j - n_] = -1.0;
      return;
    }
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      dense[col_index_[e]] = col_value_[e];
    }
  }
  bool refactor();
  void compute_primal();
  void compute_duals(const std::vector<double>& cost);
  double nonbasic_value(int j) const;
  void set_slack_basis(bool by_cost_sign);

  double ptol(double bound) const {
    return opt_.feas_tol * (1.0 + std::abs(bound));
  }
  double infeasibility(int j) const {
    const double v = x_[j];
    if (v < lo_[j] - ptol(lo_[j])) return lo_[j] - v;
    if (v > up_[j] + ptol(up_[j])) return v - up_[j];
    return 0.0;
  }

  bool dual_feasible_start() const;

  // ---- algorithms ----------------------------------------------------------
  Outcome dual_simplex();
  Outcome primal_simplex();
  bool check_iteration_budget() const { return iterations_ < max_iter_; }
  void note_step(double step);

  Solution extract(Status status, const LpProblem& p);

  SolverOptions opt_;
  int m_;
  int n_;
  int total_;

  // Scaled structural matrix, column-major.
  std::vector<int> col_start_;
  std::vector<int> col_index_;
  std::vector<double> col_value_;

  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  double cost_scale_ = 1.0;

  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;       // true (scaled) costs
  std::vector<double> dual_tol_;   // primal pricing tolerance per variable
  std::vector<double> work_cost_;  // perturbed / shifted costs

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
  std::vector<int> head_;
  std::vector<int> where_;
  std::vector<VarState> state_;

  BasisFactor factor_;
  long iterations_ = 0;
  long max_iter_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;

  std::vector<double> work_m_;
  std::vector<double> alpha_;
  std::vector<double> row_alpha_;
};

void Engine::load(const LpProblem& p) {
  // Column-major copy of the rows.
  std::vector<int> count(n_ + 1, 0);
  for (const Row& r : p.rows()) {
    for (const Term& t : r.terms) ++count[t.col + 1];
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j + 1];
  col_index_.assign(col_start_[n_], 0);
  col_value_.assign(col_start_[n_], 0.0);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : p.row(i).terms) {
      col_index_[fill[t.col]] = i;
      col_value_[fill[t.col]] = t.value;
      ++fill[t.col];
    }
  }

  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (opt_.scale) compute_scaling();

  lo_.assign(total_, 0.0);
  up_.assign(total_, 0.0);
  cost_.assign(total_, 0.0);
  double cmax = 0.0;
  for (int j = 0; j < n_; ++j) {
    cmax = std::max(cmax, std::abs(p.objective()[j] * col_scale_[j]));
  }
  cost_scale_ = (opt_.scale && cmax > 0.0) ? pow2_round(1.0 / cmax) : 1.0;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = p.objective()[j] * col_scale_[j] * cost_scale_;
    lo_[j] = p.lower()[j] / col_scale_[j];
    up_[j] = p.upper()[j] / col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) {
    const Row& r = p.row(i);
    const double rhs = r.rhs * row_scale_[i];
    const int j = n_ + i;
    switch (r.sense) {
      case Sense::kLessEqual:
        lo_[j] = -kInf;
        up_[j] = rhs;
        break;
      case Sense::kGreaterEqual:
        lo_[j] = rhs;
        up_[j] = kInf;
        break;
      case Sense::kEqual:
        lo_[j] = rhs;
        up_[j] = rhs;
        break;
    }
  }
  work_cost_ = cost_;
  // Reduced costs are judged in scaled units; tighten the tolerance where the
  // scaling would otherwise hide an unscaled violation above ~1e-7.
  dual_tol_.assign(total_, opt_.opt_tol);
  for (int j = 0; j < total_; ++j) {
    const double unscale =
        j < n_ ? cost_scale_ * col_scale_[j] : cost_scale_ / row_scale_[j - n_];
    dual_tol_[j] = std::min(opt_.opt_tol, std::max(1e-7 * unscale, 1e-13));
  }
  x_.assign(total_, 0.0);
  y_.assign(m_, 0.0);
  d_.assign(total_, 0.0);
  head_.assign(m_, 0);
  where_.assign(total_, -1);
  state_.assign(total_, VarState::kAtLower);
  work_m_.assign(m_, 0.0);
  alpha_.assign(m_, 0.0);
  row_alpha_.assign(total_, 0.0);
}

void Engine::compute_scaling() {
  // Geometric-mean scaling, a few alternating passes, rounded to powers of two
  // so that scaling itself introduces no rounding error.
  for (int pass = 0; pass < 6; ++pass) {
    std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        const double a =
            std::abs(col_value_[e]) * row_scale_[col_index_[e]] * col_scale_[j];
        rmin[col_index_[e]] = std::min(rmin[col_index_[e]], a);
        rmax[col_index_[e]] = std::max(rmax[col_index_[e]], a);
      }
    }
    for (int i = 0; i < m_; ++i) {
      if (rmax[i] > 0.0) row_scale_[i] /= std::sqrt(rmin[i] * rmax[i]);
    }
    for (int j = 0; j < n_; ++j) {
      double cmin = kInf, cmax = 0.0;
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        const double a =
            std::abs(col_value_[e]) * row_scale_[col_index_[e]] * col_scale_[j];
        cmin = std::min(cmin, a);
        cmax = std::max(cmax, a);
      }
      if (cmax > 0.0) col_scale_[j] /= std::sqrt(cmin * cmax);
    }
  }
  for (double& r : row_scale_) r = pow2_round(r);
  for (double& c : col_scale_) c = pow2_round(c);
  for (int j = 0; j < n_; ++j) {
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      col_value_[e] *= row_scale_[col_index_[e]] * col_scale_[j];
    }
  }
}

double Engine::nonbasic_value(int j) const {
  switch (state_[j]) {
    case VarState::kAtLower:
      return lo_[j];
    case VarState::kAtUpper:
      return up_[j];
    case VarState::kFree:
    case VarState::kBasic:
      return 0.0;
  }
  return 0.0;
}

void Engine::set_slack_basis(bool by_cost_sign) {
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
  }
  std::fill(where_.begin(), where_.end(), -1);
  for (int i = 0; i < m_; ++i) where_[n_ + i] = i;
  for (int j = 0; j < total_; ++j) {
    if (where_[j] >= 0) {
      state_[j] = VarState::kBasic;
      continue;
    }
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_up = std::isfinite(up_[j]);
    if (has_lo && has_up) {
      state_[j] = (by_cost_sign && work_cost_[j] < 0.0) ? VarState::kAtUpper
                                                        : VarState::kAtLower;
    } else if (has_lo) {
      state_[j] = VarState::kAtLower;
    } else if (has_up) {
      state_[j] = VarState::kAtUpper;
    } else {
      state_[j] = VarState::kFree;
    }
    x_[j] = nonbasic_value(j);
  }
}

bool Engine::refactor() {
  std::vector<SparseColumn> cols(m_);
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    if (j >= n_) {
      cols[k].index = {j - n_};
      cols[k].value = {-1.0};
    } else {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        cols[k].index.push_back(col_index_[e]);
        cols[k].value.push_back(col_value_[e]);
      }
    }
  }
  return factor_.factorize(cols);
}

void Engine::compute_primal() {
  std::fill(work_m_.begin(), work_m_.end(), 0.0);
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == VarState::kBasic) continue;
    x_[j] = nonbasic_value(j);
    const double v = x_[j];
    if (v == 0.0) continue;
    if (j >= n_) {
      work_m_[j - n_] += v;  // -(-1) * v
    } else {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        work_m_[col_index_[e]] -= col_value_[e] * v;
      }
    }
  }
  std::vector<double> rhs = work_m_;
  factor_.ftran(work_m_);
  // One round of iterative refinement on B x_B = rhs.
  std::vector<double> resid = rhs;
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    const double v = work_m_[k];
    if (j >= n_) {
      resid[j - n_] += v;
    } else {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        resid[col_index_[e]] -= col_value_[e] * v;
      }
    }
  }
  factor_.ftran(resid);
  for (int k = 0; k < m_; ++k) x_[head_[k]] = work_m_[k] + resid[k];
}

void Engine::compute_duals(const std::vector<double>& cost) {
  for (int k = 0; k < m_; ++k) y_[k] = cost[head_[k]];
  factor_.btran(y_);
  for (int j = 0; j < total_; ++j) {
    d_[j] = state_[j] == VarState::kBasic ? 0.0 : cost[j] - column_dot(j, y_);
  }
}

bool Engine::dual_feasible_start() const {
  for (int j = 0; j < n_; ++j) {
    const double c = work_cost_[j];
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_up = std::isfinite(up_[j]);
    if (c > 0.0 && !has_lo) return false;
    if (c < 0.0 && !has_up) return false;
  }
  return true;
}

void Engine::note_step(double step) {
  if (std::abs(step) <= kZeroStep) {
    if (++degenerate_run_ >= opt_.degeneracy_threshold) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
}

Outcome Engine::dual_simplex() {
  std::vector<double> rho(m_);
  int since_refactor = opt_.refactor_interval;  // force initial factorization
  bool fresh = false;
  const double dtol = opt_.opt_tol;

  while (true) {
    if (since_refactor >= opt_.refactor_interval) {
      if (!refactor()) return Outcome::kSingular;
      compute_primal();
      compute_duals(work_cost_);
      // Restore dual feasibility lost to round-off by shifting costs.
      for (int j = 0; j < total_; ++j) {
        const VarState s = state_[j];
        if (s == VarState::kBasic || lo_[j] == up_[j]) continue;
        const bool bad = (s == VarState::kAtLower && d_[j] < -dtol) ||
                         (s == VarState::kAtUpper && d_[j] > dtol) ||
                         (s == VarState::kFree && std::abs(d_[j]) > dtol);
        if (bad) {
          work_cost_[j] -= d_[j];
          d_[j] = 0.0;
        }
      }
      since_refactor = 0;
      fresh = true;
    }
    if (!check_iteration_budget()) {
      throw StalledError(fmt::format(
          "dual simplex exceeded {} iterations (bland={})", max_iter_, bland_));
    }

    // Pricing: leaving row.
    int r = -1;
    double best = 0.0;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      const double inf = infeasibility(j);
      if (inf <= 0.0) continue;
      if (bland_) {
        if (r < 0 || j < head_[r]) r = k;
      } else if (inf > best) {
        best = inf;
        r = k;
      }
    }
    if (r < 0) return Outcome::kOptimal;

    const int p = head_[r];
    const bool to_upper = x_[p] > up_[p];
    const double target = to_upper ? up_[p] : lo_[p];
    const double sign = to_upper ? 1.0 : -1.0;

    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    factor_.btran(rho);

    // Ratio test over the pivot row (two-pass Harris, Bland on request).
    double bound = kInf;
    for (int j = 0; j < total_; ++j) {
      const VarState s = state_[j];
      if (s == VarState::kBasic || lo_[j] == up_[j]) {
        row_alpha_[j] = 0.0;
        continue;
      }
      const double a = column_dot(j, rho);
      row_alpha_[j] = a;
      const double at = a * sign;
      if (s == VarState::kAtLower && at > kPivotTol) {
        bound = std::min(bound, (d_[j] + dtol) / at);
      } else if (s == VarState::kAtUpper && at < -kPivotTol) {
        bound = std::min(bound, (d_[j] - dtol) / at);
      } else if (s == VarState::kFree && std::abs(at) > kPivotTol) {
        bound = std::min(bound, (std::abs(d_[j]) + dtol) / std::abs(at));
      }
    }
    int q = -1;
    if (bound < kInf) {
      double best_alpha = 0.0;
      double best_ratio = kInf;
      for (int j = 0; j < total_; ++j) {
        const VarState s = state_[j];
        if (s == VarState::kBasic || lo_[j] == up_[j]) continue;
        const double at = row_alpha_[j] * sign;
        double ratio;
        if (s == VarState::kAtLower && at > kPivotTol) {
          ratio = d_[j] / at;
        } else if (s == VarState::kAtUpper && at < -kPivotTol) {
          ratio = d_[j] / at;
        } else if (s == VarState::kFree && std::abs(at) > kPivotTol) {
          ratio = std::abs(d_[j]) / std::abs(at);
        } else {
          continue;
        }
        if (bland_) {
          if (ratio < best_ratio - kZeroStep ||
              (ratio <= best_ratio + kZeroStep && (q < 0 || j < q))) {
            if (ratio < best_ratio - kZeroStep) best_ratio = ratio;
            q = j;
          }
        } else if (ratio <= bound && std::abs(at) > best_alpha) {
          best_alpha = std::abs(at);
          q = j;
        }
      }
    }
    if (q < 0) {
      if (!fresh) {
        since_refactor = opt_.refactor_interval;
        continue;
      }
      return Outcome::kInfeasible;
    }

    load_column(q, alpha_);
    factor_.ftran(alpha_);
    const double arq = alpha_[r];
    if (std::abs(arq - row_alpha_[q]) > 1e-7 * (1.0 + std::abs(arq)) ||
        std::abs(arq) < kPivotTol) {
      if (!fresh) {
        since_refactor = opt_.refactor_interval;
        continue;
      }
      if (std::abs(arq) < kPivotTol) return Outcome::kSingular;
    }

    // Dual step; a wrong-signed d_q (allowed by Harris) is zeroed by a shift.
    if (d_[q] * row_alpha_[q] * sign < 0.0 ||
        (state_[q] == VarState::kFree)) {
      work_cost_[q] -= d_[q];
      d_[q] = 0.0;
    }
    const double theta_d = d_[q] / row_alpha_[q];
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::kBasic || row_alpha_[j] == 0.0) continue;
      d_[j] -= theta_d * row_alpha_[j];
    }
    d_[q] = 0.0;
    d_[p] = -theta_d;

    // Primal step.
    const double theta_p = (x_[p] - target) / arq;
    for (int k = 0; k < m_; ++k) {
      if (alpha_[k] != 0.0) x_[head_[k]] -= theta_p * alpha_[k];
    }
    x_[q] += theta_p;
    x_[p] = target;

    head_[r] = q;
    where_[q] = r;
    where_[p] = -1;
    state_[q] = VarState::kBasic;
    state_[p] = to_upper ? VarState::kAtUpper : VarState::kAtLower;
    factor_.update(r, alpha_);

    ++iterations_;
    ++since_refactor;
    fresh = false;
    note_step(theta_d);
  }
}

Outcome Engine::primal_simplex() {
  std::vector<double> phase_cost(total_, 0.0);
  int since_refactor = opt_.refactor_interval;
  bool fresh = false;

  while (true) {
    if (since_refactor >= opt_.refactor_interval) {
      if (!refactor()) return Outcome::kSingular;
      compute_primal();
      since_refactor = 0;
      fresh = true;
    }
    if (!check_iteration_budget()) {
      throw StalledError(fmt::format(
          "primal simplex exceeded {} iterations (bland={})", max_iter_,
          bland_));
    }

    // Phase 1 costs: gradient of the sum of bound violations of basics.
    bool phase1 = false;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      double c = 0.0;
      if (x_[j] < lo_[j] - ptol(lo_[j])) {
        c = -1.0;
      } else if (x_[j] > up_[j] + ptol(up_[j])) {
        c = 1.0;
      }
      phase_cost[j] = c;
      if (c != 0.0) phase1 = true;
    }
    const std::vector<double>& cost = phase1 ? phase_cost : work_cost_;
    if (phase1) {
      for (int j = 0; j < total_; ++j) {
        if (state_[j] != VarState::kBasic) phase_cost[j] = 0.0;
      }
    }
    compute_duals(cost);

    // Pricing: entering column.
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < total_; ++j) {
      const VarState s = state_[j];
      if (s == VarState::kBasic || lo_[j] == up_[j]) continue;
      double score = 0.0;
      const double dtol = phase1 ? opt_.opt_tol : dual_tol_[j];
      if (s == VarState::kAtLower && d_[j] < -dtol) {
        score = -d_[j];
      } else if (s == VarState::kAtUpper && d_[j] > dtol) {
        score = d_[j];
      } else if (s == VarState::kFree && std::abs(d_[j]) > dtol) {
        score = std::abs(d_[j]);
      } else {
        continue;
      }
      if (bland_) {
        q = j;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
      }
    }
    if (q < 0) {
      if (!fresh) {
        since_refactor = opt_.refactor_interval;
        continue;
      }
      return phase1 ? Outcome::kInfeasible : Outcome::kOptimal;
    }
    const double dir = d_[q] < 0.0 ? 1.0 : -1.0;

    load_column(q, alpha_);
    factor_.ftran(alpha_);

    // Ratio test. x_B moves by -dir * t * alpha.
    double bound = kInf;
    for (int k = 0; k < m_; ++k) {
      const double a = alpha_[k];
      if (std::abs(a) <= kPivotTol) continue;
      const int j = head_[k];
      const double rate = -dir * a;
      const double v = x_[j];
      if (rate < 0.0) {
        if (v > up_[j] + ptol(up_[j])) {
          bound = std::min(bound, (v - up_[j] + ptol(up_[j])) / -rate);
        } else if (v >= lo_[j] - ptol(lo_[j]) && std::isfinite(lo_[j])) {
          bound = std::min(bound, (v - lo_[j] + ptol(lo_[j])) / -rate);
        }
      } else {
        if (v < lo_[j] - ptol(lo_[j])) {
          bound = std::min(bound, (lo_[j] - v + ptol(lo_[j])) / rate);
        } else if (v <= up_[j] + ptol(up_[j]) && std::isfinite(up_[j])) {
          bound = std::min(bound, (up_[j] - v + ptol(up_[j])) / rate);
        }
      }
    }
    int r = -1;
    double step = kInf;
    double leave_target = 0.0;
    bool leave_upper = false;
    double best_alpha = 0.0;
    if (bound < kInf) {
      for (int k = 0; k < m_; ++k) {
        const double a = alpha_[k];
        if (std::abs(a) <= kPivotTol) continue;
        const int j = head_[k];
        const double rate = -dir * a;
        const double v = x_[j];
        double ratio;
        double tgt;
        bool upper;
        if (rate < 0.0) {
          if (v > up_[j] + ptol(up_[j])) {
            tgt = up_[j];
            upper = true;
          } else if (v >= lo_[j] - ptol(lo_[j]) && std::isfinite(lo_[j])) {
            tgt = lo_[j];
            upper = false;
          } else {
            continue;
          }
          ratio = (v - tgt) / -rate;
        } else {
          if (v < lo_[j] - ptol(lo_[j])) {
            tgt = lo_[j];
            upper = false;
          } else if (v <= up_[j] + ptol(up_[j]) && std::isfinite(up_[j])) {
            tgt = up_[j];
            upper = true;
          } else {
            continue;
          }
          ratio = (tgt - v) / rate;
        }
        ratio = std::max(ratio, 0.0);
        bool take;
        if (bland_) {
          take = r < 0 || ratio < step - kZeroStep ||
                 (ratio <= step + kZeroStep && j < head_[r]);
        } else {
          take = ratio <= bound && std::abs(a) > best_alpha;
        }
        if (take) {
          r = k;
          step = ratio;
          leave_target = tgt;
          leave_upper = upper;
          best_alpha = std::abs(a);
        }
      }
    }

    const double flip = (std::isfinite(lo_[q]) && std::isfinite(up_[q]))
                            ? up_[q] - lo_[q]
                            : kInf;
    if (r < 0 && flip == kInf) {
      if (phase1 || !fresh) {
        since_refactor = opt_.refactor_interval;
        if (fresh) return Outcome::kSingular;
        continue;
      }
      return Outcome::kUnbounded;
    }

    if (flip <= step) {
      // Entering variable moves to its opposite bound; basis unchanged.
      for (int k = 0; k < m_; ++k) {
        if (alpha_[k] != 0.0) x_[head_[k]] -= dir * flip * alpha_[k];
      }
      state_[q] = state_[q] == VarState::kAtLower ? VarState::kAtUpper
                                                  : VarState::kAtLower;
      x_[q] = nonbasic_value(q);
      ++iterations_;
      note_step(flip);
      continue;
    }

    const int p = head_[r];
    for (int k = 0; k < m_; ++k) {
      if (alpha_[k] != 0.0) x_[head_[k]] -= dir * step * alpha_[k];
    }
    x_[q] += dir * step;
    x_[p] = leave_target;

    head_[r] = q;
    where_[q] = r;
    where_[p] = -1;
    state_[q] = VarState::kBasic;
    if (std::isfinite(leave_target)) {
      state_[p] = leave_upper ? VarState::kAtUpper : VarState::kAtLower;
    } else {
      state_[p] = VarState::kFree;
    }
    factor_.update(r, alpha_);

    ++iterations_;
    ++since_refactor;
    fresh = false;
    note_step(step);
  }
}

Solution Engine::extract(Status status, const LpProblem& p) {
  Solution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.primal.assign(n_, 0.0);
  sol.dual.assign(m_, 0.0);
  sol.reduced_costs.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    double v = x_[j] * col_scale_[j];
    // Nonbasic values sit exactly on their (unscaled) bound.
    if (state_[j] == VarState::kAtLower) v = p.lower()[j];
    if (state_[j] == VarState::kAtUpper) v = p.upper()[j];
    sol.primal[j] = v;
  }
  if (status == Status::kOptimal) {
    for (int i = 0; i < m_; ++i) {
      sol.dual[i] = y_[i] * row_scale_[i] / cost_scale_;
    }
    for (int j = 0; j < n_; ++j) {
      sol.reduced_costs[j] = d_[j] / (cost_scale_ * col_scale_[j]);
    }
  }
  sol.objective = p.objective_value(sol.primal);
  return sol;
}

Solution Engine::run(const LpProblem& p) {
  bool use_dual = dual_feasible_start();
  set_slack_basis(true);

  Outcome out = Outcome::kSingular;
  if (use_dual) {
    if (opt_.perturb_costs) {
      for (int j = 0; j < n_; ++j) {
        if (lo_[j] == up_[j]) continue;
        const double eps = (1e-7 + 1e-7 * hash_unit(j)) *
                           (1.0 + std::abs(work_cost_[j]));
        if (state_[j] == VarState::kAtLower) work_cost_[j] += eps;
        if (state_[j] == VarState::kAtUpper) work_cost_[j] -= eps;
      }
    }
    out = dual_simplex();
    if (out == Outcome::kSingular) {
      work_cost_ = cost_;
      set_slack_basis(false);
      degenerate_run_ = 0;
      bland_ = false;
      out = primal_simplex();
    } else if (out == Outcome::kOptimal) {
      // Drop perturbations and shifts; finish with primal phase 2 if needed.
      work_cost_ = cost_;
      degenerate_run_ = 0;
      bland_ = false;
      out = primal_simplex();
    }
  } else {
    out = primal_simplex();
  }
  if (out == Outcome::kSingular) {
    work_cost_ = cost_;
    set_slack_basis(false);
    degenerate_run_ = 0;
    bland_ = true;
    out = primal_simplex();
    if (out == Outcome::kSingular) {
      throw StalledError("basis factorization failed repeatedly");
    }
  }

  Status status = Status::kOptimal;
  if (out == Outcome::kInfeasible) status = Status::kInfeasible;
  if (out == Outcome::kUnbounded) status = Status::kUnbounded;
  if (status == Status::kOptimal) {
    if (!refactor()) throw StalledError("final basis is singular");
    compute_primal();
    compute_duals(cost_);
  }
  return extract(status, p);
}

}  // namespace

Solution SimplexBackend::solve(const LpProblem& problem,
                               const SolverOptions& options) const {
  problem.validate();
  Engine engine(problem, options);
  return engine.run(problem);
}

const SolverBackend& default_backend() {
  static const SimplexBackend backend;
  return backend;
}

Solution solve(const LpProblem& problem, double feas_tol, double opt_tol) {
  SolverOptions options;
  options.feas_tol = feas_tol;
  options.opt_tol = opt_tol;
  return solve(problem, options);
}

Solution solve(const LpProblem& problem, const SolverOptions& options) {
  return default_backend().solve(problem, options);
}

}  // namespace usc::lp
