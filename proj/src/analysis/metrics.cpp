#include "usc/analysis/metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace usc {

namespace {

double sum_of(const lp::Solution& sol, const std::vector<int>& cols) {
  double s = 0.0;
  for (int c : cols) s += sol.primal[c];
  return s;
}

double weighted_sum(const lp::Solution& sol, const std::vector<int>& cols,
                    const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t t = 0; t < cols.size(); ++t) s += w[t] * sol.primal[cols[t]];
  return s;
}

std::optional<double> ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

std::vector<double> energy_prices(const lp::Solution& sol, const VarLayout& layout) {
  std::vector<double> lambda(layout.balance_rows.size());
  for (std::size_t t = 0; t < lambda.size(); ++t) {
    lambda[t] = sol.dual.at(layout.balance_rows[t]);
  }
  return lambda;
}

std::optional<double> lcos(const lp::Solution& sol, const VarLayout& layout,
                           const Scenario& s, int r) {
  const StorageColumns& sc = layout.storages.at(r);
  const Storage& st = s.storages.at(r);
  const double out = sum_of(sol, sc.g_out);
  if (out <= 0.0) return std::nullopt;
  const double w = s.capacity_weight();
  const double fixed = w * (st.charge_cost * sol.primal[sc.cap_in] +
                            st.discharge_cost * sol.primal[sc.cap_out] +
                            st.energy_cost * sol.primal[sc.cap_level]);
  const double variable = st.var_charge_cost * sum_of(sol, sc.g_in) +
                          st.var_discharge_cost * out;
  const double charging = weighted_sum(sol, sc.g_in, energy_prices(sol, layout));
  return (fixed + variable + charging) / out;
}

std::optional<double> market_value(const lp::Solution& sol, const VarLayout& layout,
                                   int r) {
  const StorageColumns& sc = layout.storages.at(r);
  return ratio(weighted_sum(sol, sc.g_out, energy_prices(sol, layout)),
               sum_of(sol, sc.g_out));
}

std::optional<double> nsl(const lp::Solution& sol, const VarLayout& layout, int r) {
  const StorageColumns& sc = layout.storages.at(r);
  const double out = sum_of(sol, sc.g_out);
  return ratio(sum_of(sol, sc.g_in) - out, out);
}

std::optional<double> zero_profit_residual(const PolicySpec& policy,
                                           const lp::Solution& sol,
                                           const VarLayout& layout,
                                           const Scenario& s, int r) {
  const auto c = lcos(sol, layout, s, r);
  const auto v = market_value(sol, layout, r);
  const auto l = nsl(sol, layout, r);
  if (!c || !v || !l) return std::nullopt;
  double k_mu = 0.0;
  if (policy.kind == PolicyKind::kRenewableShare) {
    k_mu = loss_coverage_factor(policy.family, policy.slcr, policy.phi) *
           policy_multiplier(sol, layout, policy);
  }
  return *c + k_mu * *l - *v;
}

Rldc rldc(const lp::Solution& sol, const VarLayout& layout, const Scenario& s) {
  const int T = layout.horizon;
  Rldc out;
  out.raw = s.demand;
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    const TechColumns& tc = layout.techs[k];
    if (!tc.renewable) continue;
    const double cap = sol.primal[tc.capacity];
    const auto& g = s.technologies[k].availability;
    for (int t = 0; t < T; ++t) out.raw[t] -= g[t] * cap;
  }
  out.after_curtailment = out.raw;
  for (const TechColumns& tc : layout.techs) {
    for (int t = 0; t < static_cast<int>(tc.curtail.size()); ++t) {
      out.after_curtailment[t] += sol.primal[tc.curtail[t]];
    }
  }
  out.after_storage = out.after_curtailment;
  for (const StorageColumns& sc : layout.storages) {
    for (int t = 0; t < T; ++t) {
      out.after_storage[t] += sol.primal[sc.g_in[t]] - sol.primal[sc.g_out[t]];
    }
  }
  for (auto* v : {&out.raw, &out.after_curtailment, &out.after_storage}) {
    std::sort(v->begin(), v->end(), std::greater<>());
  }
  return out;
}

EnergyTotals energy_totals(const lp::Solution& sol, const VarLayout& layout,
                           const Scenario& s) {
  EnergyTotals e;
  e.demand = std::accumulate(s.demand.begin(), s.demand.end(), 0.0);
  for (const TechColumns& tc : layout.techs) {
    (tc.renewable ? e.renewable : e.conventional) += sum_of(sol, tc.gen);
    e.curtailment += sum_of(sol, tc.curtail);
  }
  for (const StorageColumns& sc : layout.storages) {
    e.charge += sum_of(sol, sc.g_in);
    e.discharge += sum_of(sol, sc.g_out);
  }
  return e;
}

std::optional<double> reported_share(const lp::Solution& sol, const VarLayout& layout,
                                     const Scenario& s, int family, Slcr slcr) {
  const EnergyTotals e = energy_totals(sol, layout, s);
  const double R = e.renewable;
  const double C = e.conventional;
  const double G = e.generation();
  const double D = e.demand;
  const double L = e.storage_losses();
  const int level = static_cast<int>(slcr);
  switch (family) {
    case 1: {
      const double num[] = {R, R, R - L};
      const double den[] = {D, D + L, D};
      return ratio(num[level], den[level]);
    }
    case 2: {
      const double num[] = {R, R, R - L};
      const double den[] = {G - L, G, G - L};
      return ratio(num[level], den[level]);
    }
    case 3: {
      // Conventional share q, reported as 1 - q.
      const double num[] = {C - L, C, C};
      const double den[] = {D, D + L, D};
      auto q = ratio(num[level], den[level]);
      if (!q) return std::nullopt;
      return 1.0 - *q;
    }
    case 4: {
      const double num[] = {C - L, C, C};
      const double den[] = {G - L, G, G - L};
      auto q = ratio(num[level], den[level]);
      if (!q) return std::nullopt;
      return 1.0 - *q;
    }
    default:
      throw FormulationError("constraint family not in 1..4");
  }
}

double emissions(const lp::Solution& sol, const VarLayout& layout, const Scenario& s) {
  double e = 0.0;
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    e += s.technologies[k].emission_factor * sum_of(sol, layout.techs[k].gen);
  }
  return e;
}

std::vector<TaggedPrice> tagged_prices(const lp::Solution& sol, const VarLayout& layout,
                                       const CyclingReport& report) {
  const std::vector<double> lambda = energy_prices(sol, layout);
  std::vector<TaggedPrice> out(lambda.size());
  for (std::size_t t = 0; t < lambda.size(); ++t) {
    out[t] = {static_cast<int>(t), lambda[t],
              t < report.cycling_hour.size() && report.cycling_hour[t]};
  }
  return out;
}

MetricsReport compute_metrics(const Scenario& s, const lp::Solution& sol,
                              const VarLayout& layout, const CyclingReport& cycling) {
  MetricsReport m;
  for (int r = 0; r < static_cast<int>(layout.storages.size()); ++r) {
    const StorageColumns& sc = layout.storages[r];
    StorageMetrics sm;
    sm.name = sc.name;
    sm.cap_in = sol.primal[sc.cap_in];
    sm.cap_out = sol.primal[sc.cap_out];
    sm.cap_level = sol.primal[sc.cap_level];
    sm.lcos = lcos(sol, layout, s, r);
    sm.market_value = market_value(sol, layout, r);
    sm.nsl = nsl(sol, layout, r);
    sm.zero_profit_residual = zero_profit_residual(s.policy, sol, layout, s, r);
    m.storages.push_back(std::move(sm));
  }
  m.mu_policy = policy_multiplier(sol, layout, s.policy);
  if (s.policy.kind == PolicyKind::kRenewableShare) {
    m.loss_factor = loss_coverage_factor(s.policy.family, s.policy.slcr, s.policy.phi);
  }
  m.rldc = rldc(sol, layout, s);
  m.share_zero = reported_share(sol, layout, s, 1, Slcr::kZero);
  m.share_proportionate = reported_share(sol, layout, s, 1, Slcr::kProportionate);
  m.share_complete = reported_share(sol, layout, s, 1, Slcr::kComplete);
  m.emissions = emissions(sol, layout, s);
  m.totals = energy_totals(sol, layout, s);
  m.prices = tagged_prices(sol, layout, cycling);
  return m;
}

}  // namespace usc
