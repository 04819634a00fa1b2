#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "usc/harness/harness.hpp"

namespace usc {

namespace {

struct Probe {
  double phi = 0.0;
  double share = 0.0;
  double mu = 0.0;
};

class ShareProbe {
 public:
  ShareProbe(const Scenario& base, const Variant& report_as, const RunOptions& options,
             std::vector<CalibrationStep>& trace)
      : base_(base), report_as_(report_as), options_(options), trace_(trace) {}

  Probe operator()(double phi) {
    Scenario s = base_;
    s.policy.phi = phi;
    const RunResult run = run_scenario(s, options_);
    if (!run.solution.optimal()) {
      throw CalibrationError(fmt::format("complete-SLCR run at phi={:.6g} is {}", phi,
                                         lp::to_string(run.solution.status)));
    }
    const auto share = reported_share(run.solution, run.layout, s, report_as_.family,
                                      report_as_.slcr);
    if (!share) throw CalibrationError("reported share undefined (zero denominator)");
    trace_.push_back({phi, *share});
    return {phi, *share, run.metrics.mu_policy};
  }

 private:
  const Scenario& base_;
  Variant report_as_;
  const RunOptions& options_;
  std::vector<CalibrationStep>& trace_;
};

CalibrationResult finish(const Probe& p, std::vector<CalibrationStep> trace) {
  return {p.phi, p.share, p.mu, std::move(trace)};
}

std::string format_trace(const std::vector<CalibrationStep>& trace) {
  std::string out;
  for (const CalibrationStep& st : trace) {
    out += fmt::format(" ({:.6g}, {:.6g})", st.phi, st.share);
  }
  return out;
}

}  // namespace

CalibrationResult calibrate_equivalent_target(const Scenario& base, double target_share,
                                              const Variant& report_as, double tol,
                                              int max_iterations,
                                              const RunOptions& options) {
  if (base.policy.kind != PolicyKind::kRenewableShare ||
      base.policy.slcr != Slcr::kComplete) {
    throw CalibrationError("calibration needs a complete-SLCR renewable share policy");
  }
  if (!(target_share >= 0.0 && target_share <= 1.0)) {
    throw CalibrationError(fmt::format("target share {} outside [0, 1]", target_share));
  }
  if (!(tol > 0.0)) throw CalibrationError("tolerance must be positive");

  std::vector<CalibrationStep> trace;
  ShareProbe probe(base, report_as, options, trace);
  auto gap = [&](const Probe& p) { return p.share - target_share; };

  Probe hi = probe(target_share);
  if (std::abs(gap(hi)) <= tol) return finish(hi, std::move(trace));
  Probe lo = probe(std::max(0.0, target_share - 0.1));
  if (std::abs(gap(lo)) <= tol) return finish(lo, std::move(trace));

  // Widen until the bracket holds a sign change.
  while (gap(lo) > 0.0 && gap(hi) > 0.0) {
    if (lo.phi <= 0.0) {
      throw CalibrationError(fmt::format(
          "reported share exceeds target {:.6g} down to phi=0; trace:{}", target_share,
          format_trace(trace)));
    }
    hi = lo;
    lo = probe(std::max(0.0, lo.phi - 0.1));
    if (std::abs(gap(lo)) <= tol) return finish(lo, std::move(trace));
  }
  while (gap(lo) < 0.0 && gap(hi) < 0.0) {
    if (hi.phi >= 1.0) {
      throw CalibrationError(fmt::format(
          "reported share stays below target {:.6g} up to phi=1; trace:{}", target_share,
          format_trace(trace)));
    }
    lo = hi;
    hi = probe(std::min(1.0, hi.phi + 0.1));
    if (std::abs(gap(hi)) <= tol) return finish(hi, std::move(trace));
  }
  if (gap(lo) > 0.0 && gap(hi) < 0.0) {
    throw CalibrationError(fmt::format(
        "non-monotonic bracket: share {:.6g} at phi={:.6g} above share {:.6g} at "
        "phi={:.6g}; trace:{}",
        lo.share, lo.phi, hi.share, hi.phi, format_trace(trace)));
  }

  for (int it = 0; it < max_iterations; ++it) {
    const Probe mid = probe(0.5 * (lo.phi + hi.phi));
    if (std::abs(gap(mid)) <= tol) return finish(mid, std::move(trace));
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  throw CalibrationError(fmt::format("no convergence after {} bisection steps; trace:{}",
                                     max_iterations, format_trace(trace)));
}

FactorSeparation factor_separation(const Scenario& base, double phi,
                                   const RunOptions& options) {
  const int family =
      base.policy.kind == PolicyKind::kRenewableShare ? base.policy.family : 1;
  Scenario complete = base;
  complete.policy = PolicySpec::renewable_share(family, Slcr::kComplete, phi);
  const RunResult reference = run_scenario(complete, options);
  if (!reference.solution.optimal()) {
    throw CalibrationError(fmt::format("complete-SLCR run at phi={:.6g} is {}", phi,
                                       lp::to_string(reference.solution.status)));
  }

  // A non-binding complete-SLCR row leaves the unconstrained optimum, which
  // every weaker variant shares as well; no calibration is then needed.
  auto matched_phi = [&](Slcr report) {
    if (reference.metrics.mu_policy <= 0.0) return phi;
    return calibrate_equivalent_target(complete, phi, {family, report}, 1e-3, 30, options)
        .phi;
  };

  FactorSeparation out;
  auto add = [&](std::string label, Slcr slcr, double p, const RunResult* reuse) {
    SeparationColumn col;
    col.label = std::move(label);
    col.variant = {family, slcr};
    col.phi = p;
    if (reuse) {
      col.run = *reuse;
    } else {
      Scenario s = base;
      s.policy = PolicySpec::renewable_share(family, slcr, p);
      col.run = run_scenario(s, options);
      if (!col.run.solution.optimal()) {
        throw CalibrationError(fmt::format("{} run is {}", col.label,
                                           lp::to_string(col.run.solution.status)));
      }
    }
    out.columns.push_back(std::move(col));
  };
  add("zero@phi", Slcr::kZero, phi, nullptr);
  add("complete@phi_zero", Slcr::kComplete, matched_phi(Slcr::kZero), nullptr);
  add("proportionate@phi", Slcr::kProportionate, phi, nullptr);
  add("complete@phi_prop", Slcr::kComplete, matched_phi(Slcr::kProportionate), nullptr);
  add("complete@phi", Slcr::kComplete, phi, &reference);

  auto quantity = [&](std::string name, auto&& extract) {
    SeparationQuantity q;
    q.name = std::move(name);
    for (const SeparationColumn& c : out.columns) q.values.push_back(extract(c.run));
    out.quantities.push_back(std::move(q));
  };
  const VarLayout& layout = reference.layout;
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    quantity("capacity." + layout.techs[k].name, [k](const RunResult& r) {
      return r.solution.primal[r.layout.techs[k].capacity];
    });
  }
  for (std::size_t k = 0; k < layout.storages.size(); ++k) {
    const std::string& n = layout.storages[k].name;
    quantity("capacity." + n + ".C_in", [k](const RunResult& r) {
      return r.solution.primal[r.layout.storages[k].cap_in];
    });
    quantity("capacity." + n + ".C_out", [k](const RunResult& r) {
      return r.solution.primal[r.layout.storages[k].cap_out];
    });
    quantity("capacity." + n + ".C_l", [k](const RunResult& r) {
      return r.solution.primal[r.layout.storages[k].cap_level];
    });
  }
  for (std::size_t k = 0; k < layout.techs.size(); ++k) {
    quantity("generation." + layout.techs[k].name, [k](const RunResult& r) {
      double g = 0.0;
      for (int c : r.layout.techs[k].gen) g += r.solution.primal[c];
      return g;
    });
  }
  quantity("curtailment", [](const RunResult& r) { return r.metrics.totals.curtailment; });
  quantity("storage_charge", [](const RunResult& r) { return r.metrics.totals.charge; });
  quantity("storage_discharge",
           [](const RunResult& r) { return r.metrics.totals.discharge; });
  quantity("storage_losses",
           [](const RunResult& r) { return r.metrics.totals.storage_losses(); });
  quantity("cycling_energy",
           [](const RunResult& r) { return r.cycling.total_unintended_use(); });
  quantity("objective", [](const RunResult& r) { return r.solution.objective; });

  for (const SeparationQuantity& q : out.quantities) {
    const auto& v = q.values;
    out.deltas.emplace_back(q.name, std::array<double, 4>{v[0] - v[1], v[1] - v[4],
                                                          v[2] - v[3], v[3] - v[4]});
  }
  return out;
}

}  // namespace usc
