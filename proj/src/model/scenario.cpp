#include "usc/model/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace usc {

namespace {

class Collector {
 public:
  template <typename... Args>
  void add(std::string code, fmt::format_string<Args...> f, Args&&... args) {
    out_.push_back({std::move(code), fmt::format(f, std::forward<Args>(args)...)});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

bool bad_cost(double v) { return !std::isfinite(v) || v < 0.0; }

void check_technology(const Technology& t, int horizon, Collector& c) {
  if (t.name.empty()) c.add("empty_name", "technology with empty name");
  if (static_cast<int>(t.availability.size()) != horizon) {
    c.add("series_length_mismatch",
          "technology '{}': availability has {} values, horizon is {}", t.name,
          t.availability.size(), horizon);
  }
  for (std::size_t h = 0; h < t.availability.size(); ++h) {
    const double a = t.availability[h];
    if (!(a >= 0.0 && a <= 1.0)) {
      c.add("availability_out_of_range",
            "technology '{}': availability {} at hour {} outside [0, 1]",
            t.name, a, h);
      break;
    }
  }
  if (!t.renewable()) {
    const bool all_one = std::all_of(t.availability.begin(), t.availability.end(),
                                     [](double a) { return a == 1.0; });
    if (!all_one) {
      c.add("conventional_availability",
            "conventional technology '{}' must have availability 1.0", t.name);
    }
    if (t.curtailment_cost != 0.0) {
      c.add("curtailment_on_conventional",
            "conventional technology '{}' has a curtailment cost", t.name);
    }
  }
  if (bad_cost(t.capacity_cost) || bad_cost(t.variable_cost) ||
      bad_cost(t.curtailment_cost)) {
    c.add("negative_cost", "technology '{}' has a negative or non-finite cost",
          t.name);
  }
  if (bad_cost(t.emission_factor)) {
    c.add("negative_emission_factor",
          "technology '{}' has a negative or non-finite emission factor", t.name);
  }
}

void check_storage(const Storage& r, Collector& c) {
  if (r.name.empty()) c.add("empty_name", "storage with empty name");
  if (bad_cost(r.charge_cost) || bad_cost(r.discharge_cost) ||
      bad_cost(r.energy_cost) || bad_cost(r.var_charge_cost) ||
      bad_cost(r.var_discharge_cost)) {
    c.add("negative_cost", "storage '{}' has a negative or non-finite cost",
          r.name);
  }
  if (!(r.eta_in > 0.0 && r.eta_in <= 1.0) ||
      !(r.eta_out > 0.0 && r.eta_out <= 1.0)) {
    c.add("efficiency_out_of_range",
          "storage '{}': efficiencies ({}, {}) must lie in (0, 1]", r.name,
          r.eta_in, r.eta_out);
  }
  if (!(r.self_discharge > 0.0 && r.self_discharge <= 1.0)) {
    c.add("self_discharge_out_of_range",
          "storage '{}': retention {} must lie in (0, 1]", r.name,
          r.self_discharge);
  }
}

void check_policy(const Scenario& s, Collector& c) {
  const PolicySpec& p = s.policy;
  switch (p.kind) {
    case PolicyKind::kRenewableShare:
    case PolicyKind::kPotentialShare:
      if (!(p.phi >= 0.0 && p.phi <= 1.0)) {
        c.add("phi_out_of_range", "phi {} outside [0, 1]", p.phi);
      }
      if (p.kind == PolicyKind::kRenewableShare &&
          (p.family < 1 || p.family > 4)) {
        c.add("invalid_family", "constraint family {} not in 1..4", p.family);
      }
      break;
    case PolicyKind::kCapacityTarget:
      for (const auto& [name, mw] : p.capacity_targets) {
        auto it = std::find_if(s.technologies.begin(), s.technologies.end(),
                               [&](const Technology& t) { return t.name == name; });
        if (it == s.technologies.end()) {
          c.add("unknown_technology", "capacity target for unknown technology '{}'",
                name);
        } else if (!it->renewable()) {
          c.add("target_on_conventional",
                "capacity target on conventional technology '{}'", name);
        }
        if (!std::isfinite(mw) || mw < 0.0) {
          c.add("invalid_target", "capacity target {} for '{}'", mw, name);
        }
      }
      break;
    case PolicyKind::kCarbonCap:
      if (std::isnan(p.cap) || p.cap < 0.0) {
        c.add("invalid_carbon_cap", "carbon cap {} must be >= 0", p.cap);
      }
      break;
    case PolicyKind::kCarbonPrice:
      if (!std::isfinite(p.price) || p.price < 0.0) {
        c.add("invalid_carbon_price", "carbon price {} must be >= 0", p.price);
      }
      break;
    case PolicyKind::kNone:
      break;
  }
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  Collector c;
  if (s.horizon < 2) c.add("horizon_too_short", "horizon {} < 2", s.horizon);
  if (static_cast<int>(s.demand.size()) != s.horizon) {
    c.add("series_length_mismatch", "demand has {} values, horizon is {}",
          s.demand.size(), s.horizon);
  }
  for (std::size_t h = 0; h < s.demand.size(); ++h) {
    if (!(s.demand[h] >= 0.0) || !std::isfinite(s.demand[h])) {
      c.add("negative_demand", "demand {} at hour {}", s.demand[h], h);
      break;
    }
  }
  if (s.technologies.empty()) c.add("no_technology", "scenario has no technology");
  if (!(s.hours_per_year > 0.0)) {
    c.add("invalid_hours_per_year", "hours_per_year {} must be > 0",
          s.hours_per_year);
  }

  std::set<std::string> names;
  for (const Technology& t : s.technologies) {
    check_technology(t, s.horizon, c);
    if (!names.insert(t.name).second) {
      c.add("duplicate_name", "name '{}' used twice", t.name);
    }
  }
  for (const Storage& r : s.storages) {
    check_storage(r, c);
    if (!names.insert(r.name).second) {
      c.add("duplicate_name", "name '{}' used twice", r.name);
    }
  }
  check_policy(s, c);
  return c.take();
}

std::string_view to_string(TechClass c) {
  return c == TechClass::kRenewable ? "renewable" : "conventional";
}

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kNone:
      return "none";
    case PolicyKind::kRenewableShare:
      return "renewable_share";
    case PolicyKind::kPotentialShare:
      return "potential_share";
    case PolicyKind::kCapacityTarget:
      return "capacity_target";
    case PolicyKind::kCarbonCap:
      return "carbon_cap";
    case PolicyKind::kCarbonPrice:
      return "carbon_price";
  }
  return "?";
}

std::string_view to_string(Slcr s) {
  switch (s) {
    case Slcr::kZero:
      return "zero";
    case Slcr::kProportionate:
      return "proportionate";
    case Slcr::kComplete:
      return "complete";
  }
  return "?";
}

char slcr_letter(Slcr s) {
  return s == Slcr::kZero ? 'a' : (s == Slcr::kProportionate ? 'b' : 'c');
}

std::string variant_label(int family, Slcr slcr) {
  return fmt::format("{}{}", family, slcr_letter(slcr));
}

Slcr parse_slcr(std::string_view text) {
  if (text == "zero" || text == "a") return Slcr::kZero;
  if (text == "proportionate" || text == "b") return Slcr::kProportionate;
  if (text == "complete" || text == "c") return Slcr::kComplete;
  throw std::invalid_argument(fmt::format("unknown SLCR level '{}'", text));
}

PolicyKind parse_policy_kind(std::string_view text) {
  for (PolicyKind k :
       {PolicyKind::kNone, PolicyKind::kRenewableShare, PolicyKind::kPotentialShare,
        PolicyKind::kCapacityTarget, PolicyKind::kCarbonCap,
        PolicyKind::kCarbonPrice}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument(fmt::format("unknown policy kind '{}'", text));
}

TechClass parse_tech_class(std::string_view text) {
  if (text == "renewable") return TechClass::kRenewable;
  if (text == "conventional") return TechClass::kConventional;
  throw std::invalid_argument(fmt::format("unknown technology class '{}'", text));
}

}  // namespace usc
