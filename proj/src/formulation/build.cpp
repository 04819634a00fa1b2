#include "usc/formulation/build.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace usc {

using lp::kInf;
using lp::Sense;
using lp::Term;

int VarLayout::num_columns() const {
  int n = 0;
  for (const TechColumns& t : techs) {
    n += 1 + static_cast<int>(t.gen.size() + t.curtail.size());
  }
  for (const StorageColumns& r : storages) {
    n += 3 + static_cast<int>(r.g_in.size() + r.g_out.size() + r.level.size());
  }
  return n;
}

const TechColumns& VarLayout::tech(const std::string& name) const {
  for (const TechColumns& t : techs) {
    if (t.name == name) return t;
  }
  throw FormulationError(fmt::format("unknown technology '{}'", name));
}

std::vector<double> effective_variable_costs(const Scenario& s) {
  std::vector<double> o;
  o.reserve(s.technologies.size());
  const bool priced = s.policy.kind == PolicyKind::kCarbonPrice;
  for (const Technology& t : s.technologies) {
    o.push_back(t.variable_cost + (priced ? s.policy.price * t.emission_factor : 0.0));
  }
  return o;
}

namespace {

void append_sum(std::vector<Term>& terms, const std::vector<int>& cols, double coef) {
  if (coef == 0.0) return;
  for (int c : cols) terms.push_back({c, coef});
}

// coef_r * R + coef_c * C + coef_l * L, with L = sum(G_in - G_out).
std::vector<Term> share_terms(const VarLayout& layout, double coef_r,
                              double coef_c, double coef_l) {
  std::vector<Term> terms;
  for (const TechColumns& t : layout.techs) {
    append_sum(terms, t.gen, t.renewable ? coef_r : coef_c);
  }
  for (const StorageColumns& r : layout.storages) {
    append_sum(terms, r.g_in, coef_l);
    append_sum(terms, r.g_out, -coef_l);
  }
  return lp::canonicalize(std::move(terms));
}

void check_phi(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) {
    throw FormulationError(fmt::format("phi {} outside [0, 1]", phi));
  }
}

}  // namespace

PolicyRow policy_row(int family, Slcr slcr, double phi, const VarLayout& layout,
                     const std::vector<double>& demand) {
  check_phi(phi);
  const double total = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double q = 1.0 - phi;
  const int level = static_cast<int>(slcr);  // 0 = a, 1 = b, 2 = c
  PolicyRow row;
  switch (family) {
    case 1: {
      const double loss[] = {0.0, -phi, -1.0};
      row.terms = share_terms(layout, 1.0, 0.0, loss[level]);
      row.sense = Sense::kGreaterEqual;
      row.rhs = phi * total;
      break;
    }
    case 2: {
      // R - phi (R + C) + loss * L
      const double loss[] = {phi, 0.0, -q};
      row.terms = share_terms(layout, 1.0 - phi, -phi, loss[level]);
      row.sense = Sense::kGreaterEqual;
      row.rhs = 0.0;
      break;
    }
    case 3: {
      const double loss[] = {-1.0, -q, 0.0};
      row.terms = share_terms(layout, 0.0, 1.0, loss[level]);
      row.sense = Sense::kLessEqual;
      row.rhs = q * total;
      break;
    }
    case 4: {
      // C - (1-phi)(R + C) + loss * L
      const double loss[] = {-phi, 0.0, q};
      row.terms = share_terms(layout, -q, phi, loss[level]);
      row.sense = Sense::kLessEqual;
      row.rhs = 0.0;
      break;
    }
    default:
      throw FormulationError(fmt::format("constraint family {} not in 1..4", family));
  }
  return row;
}

double loss_coverage_factor(int family, Slcr slcr, double phi) {
  const double q = 1.0 - phi;
  const int level = static_cast<int>(slcr);
  switch (family) {
    case 1: {
      const double k[] = {0.0, phi, 1.0};
      return k[level];
    }
    case 2:
    case 4: {
      const double k[] = {-phi, 0.0, q};
      return k[level];
    }
    case 3: {
      const double k[] = {-1.0, -q, 0.0};
      return k[level];
    }
    default:
      throw FormulationError(fmt::format("constraint family {} not in 1..4", family));
  }
}

double policy_multiplier(const lp::Solution& sol, const VarLayout& layout,
                         const PolicySpec& policy) {
  if (!layout.policy_row) return 0.0;
  const double y = sol.dual.at(*layout.policy_row);
  const bool upper_row =
      (policy.kind == PolicyKind::kRenewableShare && policy.family >= 3) ||
      policy.kind == PolicyKind::kCarbonCap;
  return upper_row ? -y : y;
}

PolicyRow potential_share_row(double phi, const VarLayout& layout,
                              const Scenario& s) {
  check_phi(phi);
  PolicyRow row;
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    const TechColumns& t = layout.techs[k];
    if (!t.renewable) continue;
    const auto& g = s.technologies[k].availability;
    row.terms.push_back({t.capacity, std::accumulate(g.begin(), g.end(), 0.0)});
  }
  row.terms = lp::canonicalize(std::move(row.terms));
  row.sense = Sense::kGreaterEqual;
  row.rhs = phi * std::accumulate(s.demand.begin(), s.demand.end(), 0.0);
  return row;
}

std::vector<std::pair<std::string, PolicyRow>> capacity_target_rows(
    const std::map<std::string, double>& targets, const VarLayout& layout) {
  std::vector<std::pair<std::string, PolicyRow>> rows;
  for (const auto& [name, mw] : targets) {
    const TechColumns& t = layout.tech(name);
    if (!t.renewable) {
      throw FormulationError(
          fmt::format("capacity target on conventional technology '{}'", name));
    }
    rows.emplace_back(name, PolicyRow{{{t.capacity, 1.0}}, Sense::kGreaterEqual, mw});
  }
  return rows;
}

std::optional<PolicyRow> carbon_cap_row(double cap, const VarLayout& layout,
                                        const Scenario& s) {
  if (std::isinf(cap) && cap > 0.0) return std::nullopt;
  PolicyRow row;
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    append_sum(row.terms, layout.techs[k].gen, s.technologies[k].emission_factor);
  }
  row.terms = lp::canonicalize(std::move(row.terms));
  row.sense = Sense::kLessEqual;
  row.rhs = cap;
  return row;
}

std::pair<lp::LpProblem, VarLayout> build_lp(const Scenario& s) {
  const auto violations = validate_scenario(s);
  if (!violations.empty()) {
    std::string msg = "invalid scenario:";
    for (const Violation& v : violations) msg += fmt::format(" [{}] {};", v.code, v.message);
    throw FormulationError(msg);
  }

  const int T = s.horizon;
  const double w = s.capacity_weight();
  const std::vector<double> o = effective_variable_costs(s);
  lp::LpProblem p;
  VarLayout layout;
  layout.horizon = T;

  for (std::size_t k = 0; k < s.technologies.size(); ++k) {
    const Technology& tech = s.technologies[k];
    TechColumns tc;
    tc.name = tech.name;
    tc.renewable = tech.renewable();
    tc.capacity = p.add_column(fmt::format("C[{}]", tech.name), w * tech.capacity_cost);
    for (int t = 0; t < T; ++t) {
      tc.gen.push_back(p.add_column(fmt::format("G[{}][{}]", tech.name, t), o[k]));
    }
    if (tc.renewable) {
      for (int t = 0; t < T; ++t) {
        tc.curtail.push_back(
            p.add_column(fmt::format("CU[{}][{}]", tech.name, t), tech.curtailment_cost));
      }
    }
    layout.techs.push_back(std::move(tc));
  }
  for (const Storage& r : s.storages) {
    StorageColumns sc;
    sc.name = r.name;
    sc.cap_in = p.add_column(fmt::format("C_in[{}]", r.name), w * r.charge_cost);
    sc.cap_out = p.add_column(fmt::format("C_out[{}]", r.name), w * r.discharge_cost);
    sc.cap_level = p.add_column(fmt::format("C_l[{}]", r.name), w * r.energy_cost);
    for (int t = 0; t < T; ++t) {
      sc.g_in.push_back(
          p.add_column(fmt::format("G_in[{}][{}]", r.name, t), r.var_charge_cost));
    }
    for (int t = 0; t < T; ++t) {
      sc.g_out.push_back(
          p.add_column(fmt::format("G_out[{}][{}]", r.name, t), r.var_discharge_cost));
    }
    for (int t = 0; t < T; ++t) {
      sc.level.push_back(p.add_column(fmt::format("G_l[{}][{}]", r.name, t), 0.0));
    }
    layout.storages.push_back(std::move(sc));
  }

  // Hourly energy balance.
  for (int t = 0; t < T; ++t) {
    std::vector<Term> terms;
    for (const TechColumns& tc : layout.techs) terms.push_back({tc.gen[t], 1.0});
    for (const StorageColumns& sc : layout.storages) {
      terms.push_back({sc.g_out[t], 1.0});
      terms.push_back({sc.g_in[t], -1.0});
    }
    layout.balance_rows.push_back(
        p.add_row(fmt::format("balance[{}]", t), std::move(terms), Sense::kEqual, s.demand[t]));
  }

  // Availability (renewables) and capacity (conventional) limits.
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    TechColumns& tc = layout.techs[k];
    const Technology& tech = s.technologies[k];
    for (int t = 0; t < T; ++t) {
      if (tc.renewable) {
        tc.limit_rows.push_back(p.add_row(
            fmt::format("avail[{}][{}]", tech.name, t),
            {{tc.capacity, tech.availability[t]}, {tc.gen[t], -1.0}, {tc.curtail[t], -1.0}},
            Sense::kEqual, 0.0));
      } else {
        tc.limit_rows.push_back(p.add_row(fmt::format("cap[{}][{}]", tech.name, t),
                                          {{tc.capacity, 1.0}, {tc.gen[t], -1.0}},
                                          Sense::kGreaterEqual, 0.0));
      }
    }
  }

  for (std::size_t k = 0; k < layout.storages.size(); ++k) {
    StorageColumns& sc = layout.storages[k];
    const Storage& r = s.storages[k];
    for (int t = 0; t < T; ++t) {
      sc.cap_in_rows.push_back(p.add_row(fmt::format("cap_in[{}][{}]", r.name, t),
                                         {{sc.cap_in, 1.0}, {sc.g_in[t], -1.0}},
                                         Sense::kGreaterEqual, 0.0));
      sc.cap_out_rows.push_back(p.add_row(fmt::format("cap_out[{}][{}]", r.name, t),
                                          {{sc.cap_out, 1.0}, {sc.g_out[t], -1.0}},
                                          Sense::kGreaterEqual, 0.0));
      sc.cap_level_rows.push_back(p.add_row(fmt::format("cap_l[{}][{}]", r.name, t),
                                            {{sc.cap_level, 1.0}, {sc.level[t], -1.0}},
                                            Sense::kGreaterEqual, 0.0));
    }
    for (int t = 0; t < T; ++t) {
      std::vector<Term> terms = {{sc.level[t], 1.0},
                                 {sc.g_in[t], -r.eta_in},
                                 {sc.g_out[t], 1.0 / r.eta_out}};
      if (t > 0) {
        terms.push_back({sc.level[t - 1], -r.self_discharge});
      } else if (s.wrap_storage_level) {
        terms.push_back({sc.level[T - 1], -r.self_discharge});
      }
      sc.level_rows.push_back(p.add_row(fmt::format("level[{}][{}]", r.name, t),
                                        std::move(terms), Sense::kEqual, 0.0));
    }
  }

  const PolicySpec& pol = s.policy;
  auto add_policy = [&](const std::string& name, PolicyRow row) {
    layout.policy_row = p.add_row(name, std::move(row.terms), row.sense, row.rhs);
  };
  switch (pol.kind) {
    case PolicyKind::kNone:
    case PolicyKind::kCarbonPrice:
      break;
    case PolicyKind::kRenewableShare:
      add_policy(fmt::format("policy[{}]", variant_label(pol.family, pol.slcr)),
                 policy_row(pol.family, pol.slcr, pol.phi, layout, s.demand));
      break;
    case PolicyKind::kPotentialShare:
      add_policy("policy[potential]", potential_share_row(pol.phi, layout, s));
      break;
    case PolicyKind::kCapacityTarget:
      for (auto& [name, row] : capacity_target_rows(pol.capacity_targets, layout)) {
        const int id = p.add_row(fmt::format("target[{}]", name), std::move(row.terms),
                                 row.sense, row.rhs);
        layout.target_rows.emplace_back(name, id);
      }
      break;
    case PolicyKind::kCarbonCap:
      if (auto row = carbon_cap_row(pol.cap, layout, s)) {
        add_policy("policy[carbon_cap]", std::move(*row));
      }
      break;
  }
  return {std::move(p), std::move(layout)};
}

}  // namespace usc
