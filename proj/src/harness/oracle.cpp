// Dense textbook LP path used only to cross-check the main formulation and
// solver. Shares no code with the lp backend or build_lp.
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "usc/harness/harness.hpp"

namespace usc {

namespace {

using Real = long double;
constexpr Real kPivotEps = 1e-11L;

struct DenseRow {
  std::vector<double> a;
  lp::Sense sense = lp::Sense::kEqual;
  double rhs = 0.0;
};

struct DenseLp {
  std::vector<double> cost;
  std::vector<DenseRow> rows;

  int add_var(double c) {
    cost.push_back(c);
    for (DenseRow& r : rows) r.a.push_back(0.0);
    return static_cast<int>(cost.size()) - 1;
  }
  DenseRow& add_row(lp::Sense sense, double rhs) {
    rows.push_back({std::vector<double>(cost.size(), 0.0), sense, rhs});
    return rows.back();
  }
};

class Tableau {
 public:
  // Columns: structurals, then slack/surplus, then artificials.
  Tableau(const DenseLp& lp) : n_(static_cast<int>(lp.cost.size())) {
    m_ = static_cast<int>(lp.rows.size());
    int slacks = 0;
    for (const DenseRow& r : lp.rows) slacks += r.sense != lp::Sense::kEqual;
    first_art_ = n_ + slacks;
    width_ = first_art_ + m_;
    t_.assign(static_cast<std::size_t>(m_) * (width_ + 1), 0.0L);
    basis_.assign(m_, -1);
    int s = n_;
    for (int i = 0; i < m_; ++i) {
      const DenseRow& r = lp.rows[i];
      const Real sign = r.rhs < 0.0 ? -1.0L : 1.0L;
      for (int j = 0; j < n_; ++j) at(i, j) = sign * r.a[j];
      if (r.sense != lp::Sense::kEqual) {
        at(i, s++) = sign * (r.sense == lp::Sense::kLessEqual ? 1.0L : -1.0L);
      }
      at(i, first_art_ + i) = 1.0L;
      rhs(i) = sign * r.rhs;
      basis_[i] = first_art_ + i;
    }
  }

  long pivots() const { return pivots_; }

  // Bland's rule on the given costs over columns [0, limit). Returns false
  // when the objective is unbounded below.
  bool optimize(const std::vector<Real>& cost, int limit) {
    std::vector<Real> y(m_);
    for (;;) {
      for (int i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
      int enter = -1;
      for (int j = 0; j < limit && enter < 0; ++j) {
        if (is_basic(j)) continue;
        Real d = cost[j];
        for (int i = 0; i < m_; ++i) d -= y[i] * at(i, j);
        if (d < -1e-10L * (1.0L + std::fabs(cost[j]))) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      Real best = 0.0L;
      for (int i = 0; i < m_; ++i) {
        const Real a = at(i, enter);
        if (a <= kPivotEps) continue;
        const Real ratio = rhs(i) / a;
        if (leave < 0 || ratio < best - 1e-15L ||
            (ratio <= best + 1e-15L && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  // Pivots basic artificials out where a nonzero structural or slack entry
  // exists; rows without one are redundant and keep their zero artificial.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_art_) continue;
      for (int j = 0; j < first_art_; ++j) {
        if (!is_basic(j) && std::fabs(at(i, j)) > 1e-9L) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Real value(const std::vector<Real>& cost) const {
    Real v = 0.0L;
    for (int i = 0; i < m_; ++i) v += cost[basis_[i]] * rhs(i);
    return v;
  }

  std::vector<double> primal() const {
    std::vector<double> x(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = static_cast<double>(rhs(i));
    }
    return x;
  }

  int width() const { return width_; }
  int first_artificial() const { return first_art_; }

 private:
  Real& at(int i, int j) { return t_[static_cast<std::size_t>(i) * (width_ + 1) + j]; }
  Real at(int i, int j) const { return t_[static_cast<std::size_t>(i) * (width_ + 1) + j]; }
  Real& rhs(int i) { return at(i, width_); }
  Real rhs(int i) const { return at(i, width_); }

  bool is_basic(int j) const {
    for (int b : basis_) {
      if (b == j) return true;
    }
    return false;
  }

  void pivot(int r, int c) {
    const Real p = at(r, c);
    for (int j = 0; j <= width_; ++j) at(r, j) /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const Real f = at(i, c);
      if (f == 0.0L) continue;
      for (int j = 0; j <= width_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0L;
    }
    basis_[r] = c;
    ++pivots_;
  }

  int n_;
  int m_ = 0;
  int first_art_ = 0;
  int width_ = 0;
  std::vector<Real> t_;
  std::vector<int> basis_;
  long pivots_ = 0;
};

OracleResult solve_dense(const DenseLp& lp) {
  Tableau tab(lp);
  OracleResult out;
  std::vector<Real> phase1(tab.width(), 0.0L);
  for (int j = tab.first_artificial(); j < tab.width(); ++j) phase1[j] = 1.0L;
  tab.optimize(phase1, tab.width());
  Real scale = 1.0L;
  for (const DenseRow& r : lp.rows) scale += std::fabs(r.rhs);
  if (tab.value(phase1) > 1e-9L * scale) {
    out.pivots = tab.pivots();
    return out;
  }
  tab.expel_artificials();
  std::vector<Real> phase2(tab.width(), 0.0L);
  for (std::size_t j = 0; j < lp.cost.size(); ++j) phase2[j] = lp.cost[j];
  const bool bounded = tab.optimize(phase2, tab.first_artificial());
  out.pivots = tab.pivots();
  if (!bounded) {
    out.status = lp::Status::kUnbounded;
    return out;
  }
  out.status = lp::Status::kOptimal;
  const std::vector<double> x = tab.primal();
  out.objective = std::inner_product(x.begin(), x.end(), lp.cost.begin(), 0.0);
  return out;
}

// Coefficients (on R, C, L) and rhs of a renewable share row, G = R + C.
struct ShareRow {
  double r, c, l, rhs;
  lp::Sense sense;
};

ShareRow share_row(int family, Slcr slcr, double phi, double demand) {
  const double q = 1.0 - phi;
  const auto ge = lp::Sense::kGreaterEqual;
  const auto le = lp::Sense::kLessEqual;
  switch (family * 3 + static_cast<int>(slcr)) {
    case 3: return {1, 0, 0, phi * demand, ge};              // R >= phi D
    case 4: return {1, 0, -phi, phi * demand, ge};           // R >= phi (D + L)
    case 5: return {1, 0, -1, phi * demand, ge};             // R - L >= phi D
    case 6: return {q, -phi, phi, 0, ge};                    // R >= phi (G - L)
    case 7: return {q, -phi, 0, 0, ge};                      // R >= phi G
    case 8: return {q, -phi, -q, 0, ge};                     // R >= phi G + (1-phi) L
    case 9: return {0, 1, -1, q * demand, le};               // C - L <= (1-phi) D
    case 10: return {0, 1, -q, q * demand, le};              // C - (1-phi) L <= (1-phi) D
    case 11: return {0, 1, 0, q * demand, le};               // C <= (1-phi) D
    case 12: return {-q, phi, -phi, 0, le};                  // C <= (1-phi) G + phi L
    case 13: return {-q, phi, 0, 0, le};                     // C <= (1-phi) G
    case 14: return {-q, phi, q, 0, le};                     // C <= (1-phi) (G - L)
    default: throw std::invalid_argument("constraint family not in 1..4");
  }
}

}  // namespace

OracleResult dense_tableau_solve(const lp::LpProblem& p) {
  DenseLp lp;
  for (int j = 0; j < p.num_columns(); ++j) {
    if (p.lower()[j] != 0.0 || p.upper()[j] != lp::kInf) {
      throw std::invalid_argument("dense oracle supports only columns in [0, inf)");
    }
    lp.add_var(p.objective()[j]);
  }
  for (const lp::Row& row : p.rows()) {
    DenseRow& r = lp.add_row(row.sense, row.rhs);
    for (const lp::Term& t : row.terms) r.a.at(t.col) += t.value;
  }
  return solve_dense(lp);
}

OracleResult brute_force_oracle(const Scenario& s) {
  if (s.horizon > 12 || s.technologies.size() > 2 || s.storages.size() > 1) {
    throw std::invalid_argument(
        "oracle accepts at most 12 hours, two technologies and one storage");
  }
  if (const auto v = validate_scenario(s); !v.empty()) {
    throw std::invalid_argument(fmt::format("invalid scenario: {}", v.front().message));
  }
  const int T = s.horizon;
  const double w = s.horizon / s.hours_per_year;
  const PolicySpec& pol = s.policy;
  DenseLp lp;

  struct TechVars {
    int cap;
    std::vector<int> gen, curt;
  };
  std::vector<TechVars> tv;
  for (const Technology& t : s.technologies) {
    const double o = t.variable_cost +
                     (pol.kind == PolicyKind::kCarbonPrice ? pol.price * t.emission_factor
                                                           : 0.0);
    TechVars v;
    v.cap = lp.add_var(w * t.capacity_cost);
    for (int h = 0; h < T; ++h) v.gen.push_back(lp.add_var(o));
    if (t.renewable()) {
      for (int h = 0; h < T; ++h) v.curt.push_back(lp.add_var(t.curtailment_cost));
    }
    tv.push_back(std::move(v));
  }
  struct StoreVars {
    int cin, cout, cl;
    std::vector<int> in, out, lev;
  };
  std::vector<StoreVars> sv;
  for (const Storage& st : s.storages) {
    StoreVars v;
    v.cin = lp.add_var(w * st.charge_cost);
    v.cout = lp.add_var(w * st.discharge_cost);
    v.cl = lp.add_var(w * st.energy_cost);
    for (int h = 0; h < T; ++h) {
      v.in.push_back(lp.add_var(st.var_charge_cost));
      v.out.push_back(lp.add_var(st.var_discharge_cost));
      v.lev.push_back(lp.add_var(0.0));
    }
    sv.push_back(std::move(v));
  }

  for (int h = 0; h < T; ++h) {
    DenseRow& r = lp.add_row(lp::Sense::kEqual, s.demand[h]);
    for (const TechVars& v : tv) r.a[v.gen[h]] = 1.0;
    for (const StoreVars& v : sv) {
      r.a[v.out[h]] = 1.0;
      r.a[v.in[h]] = -1.0;
    }
  }
  for (std::size_t k = 0; k < tv.size(); ++k) {
    const TechVars& v = tv[k];
    for (int h = 0; h < T; ++h) {
      if (s.technologies[k].renewable()) {
        DenseRow& r = lp.add_row(lp::Sense::kEqual, 0.0);
        r.a[v.gen[h]] = 1.0;
        r.a[v.curt[h]] = 1.0;
        r.a[v.cap] = -s.technologies[k].availability[h];
      } else {
        DenseRow& r = lp.add_row(lp::Sense::kLessEqual, 0.0);
        r.a[v.gen[h]] = 1.0;
        r.a[v.cap] = -1.0;
      }
    }
  }
  for (std::size_t k = 0; k < sv.size(); ++k) {
    const StoreVars& v = sv[k];
    const Storage& st = s.storages[k];
    for (int h = 0; h < T; ++h) {
      for (auto [flow, cap] : {std::pair{v.in[h], v.cin}, std::pair{v.out[h], v.cout},
                               std::pair{v.lev[h], v.cl}}) {
        DenseRow& r = lp.add_row(lp::Sense::kLessEqual, 0.0);
        r.a[flow] = 1.0;
        r.a[cap] = -1.0;
      }
      DenseRow& r = lp.add_row(lp::Sense::kEqual, 0.0);
      r.a[v.lev[h]] = 1.0;
      r.a[v.in[h]] = -st.eta_in;
      r.a[v.out[h]] = 1.0 / st.eta_out;
      const int prev = h > 0 ? h - 1 : (s.wrap_storage_level ? T - 1 : -1);
      if (prev >= 0) r.a[v.lev[prev]] -= st.self_discharge;
    }
  }

  const double total_demand = std::accumulate(s.demand.begin(), s.demand.end(), 0.0);
  switch (pol.kind) {
    case PolicyKind::kNone:
    case PolicyKind::kCarbonPrice:
      break;
    case PolicyKind::kRenewableShare: {
      const ShareRow sr = share_row(pol.family, pol.slcr, pol.phi, total_demand);
      DenseRow& r = lp.add_row(sr.sense, sr.rhs);
      for (std::size_t k = 0; k < tv.size(); ++k) {
        const double coef = s.technologies[k].renewable() ? sr.r : sr.c;
        for (int g : tv[k].gen) r.a[g] += coef;
      }
      for (const StoreVars& v : sv) {
        for (int h = 0; h < T; ++h) {
          r.a[v.in[h]] += sr.l;
          r.a[v.out[h]] -= sr.l;
        }
      }
      break;
    }
    case PolicyKind::kPotentialShare: {
      DenseRow& r = lp.add_row(lp::Sense::kGreaterEqual, pol.phi * total_demand);
      for (std::size_t k = 0; k < tv.size(); ++k) {
        const auto& g = s.technologies[k].availability;
        if (s.technologies[k].renewable()) {
          r.a[tv[k].cap] = std::accumulate(g.begin(), g.end(), 0.0);
        }
      }
      break;
    }
    case PolicyKind::kCapacityTarget:
      for (const auto& [name, target] : pol.capacity_targets) {
        for (std::size_t k = 0; k < tv.size(); ++k) {
          if (s.technologies[k].name != name) continue;
          DenseRow& r = lp.add_row(lp::Sense::kGreaterEqual, target);
          r.a[tv[k].cap] = 1.0;
        }
      }
      break;
    case PolicyKind::kCarbonCap:
      if (std::isfinite(pol.cap)) {
        DenseRow& r = lp.add_row(lp::Sense::kLessEqual, pol.cap);
        for (std::size_t k = 0; k < tv.size(); ++k) {
          for (int g : tv[k].gen) r.a[g] = s.technologies[k].emission_factor;
        }
      }
      break;
  }
  return solve_dense(lp);
}

}  // namespace usc
