#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "usc/analysis/cycling.hpp"
#include "usc/formulation/build.hpp"
#include "usc/harness/harness.hpp"
#include "usc/io/config.hpp"
#include "usc/io/results.hpp"
#include "usc/model/costs.hpp"
#include "usc/model/scenario.hpp"

namespace py = pybind11;
using namespace usc;

namespace {

RunOptions make_options(double cycling_tol) {
  RunOptions o;
  o.cycling_tol = cycling_tol;
  return o;
}

std::vector<Variant> to_variants(const std::vector<std::string>& labels) {
  if (labels.empty()) return all_variants();
  std::vector<Variant> out;
  out.reserve(labels.size());
  for (const std::string& l : labels) out.push_back(parse_variant(l));
  return out;
}

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["axis_value"] = r.axis_value;
  d["variant"] = r.variant.label();
  d["status"] = r.status;
  d["message"] = r.message;
  d["objective"] = r.objective;
  d["cycling_energy"] = r.cycling_energy;
  d["cycling_hours"] = r.cycling_hours;
  d["storage_losses"] = r.storage_losses;
  d["curtailment"] = r.curtailment;
  d["emissions"] = r.emissions;
  d["indeterminate"] = r.indeterminate;
  py::dict caps;
  for (const auto& [name, v] : r.capacities) caps[py::str(name)] = v;
  d["capacities"] = caps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Capacity expansion LP with storage and renewable share policies";

  py::enum_<TechClass>(m, "TechClass")
      .value("renewable", TechClass::kRenewable)
      .value("conventional", TechClass::kConventional);
  py::enum_<PolicyKind>(m, "PolicyKind")
      .value("none", PolicyKind::kNone)
      .value("renewable_share", PolicyKind::kRenewableShare)
      .value("potential_share", PolicyKind::kPotentialShare)
      .value("capacity_target", PolicyKind::kCapacityTarget)
      .value("carbon_cap", PolicyKind::kCarbonCap)
      .value("carbon_price", PolicyKind::kCarbonPrice);
  py::enum_<Slcr>(m, "Slcr")
      .value("zero", Slcr::kZero)
      .value("proportionate", Slcr::kProportionate)
      .value("complete", Slcr::kComplete);

  py::class_<Technology>(m, "Technology")
      .def(py::init<>())
      .def_readwrite("name", &Technology::name)
      .def_readwrite("tech_class", &Technology::tech_class)
      .def_readwrite("capacity_cost", &Technology::capacity_cost)
      .def_readwrite("variable_cost", &Technology::variable_cost)
      .def_readwrite("availability", &Technology::availability)
      .def_readwrite("curtailment_cost", &Technology::curtailment_cost)
      .def_readwrite("emission_factor", &Technology::emission_factor);

  py::class_<Storage>(m, "Storage")
      .def(py::init<>())
      .def_readwrite("name", &Storage::name)
      .def_readwrite("charge_cost", &Storage::charge_cost)
      .def_readwrite("discharge_cost", &Storage::discharge_cost)
      .def_readwrite("energy_cost", &Storage::energy_cost)
      .def_readwrite("var_charge_cost", &Storage::var_charge_cost)
      .def_readwrite("var_discharge_cost", &Storage::var_discharge_cost)
      .def_readwrite("eta_in", &Storage::eta_in)
      .def_readwrite("eta_out", &Storage::eta_out)
      .def_readwrite("self_discharge", &Storage::self_discharge)
      .def_property_readonly("round_trip", &Storage::round_trip);

  py::class_<PolicySpec>(m, "PolicySpec")
      .def(py::init<>())
      .def_static("renewable_share", &PolicySpec::renewable_share, py::arg("family"),
                  py::arg("slcr"), py::arg("phi"))
      .def_readwrite("kind", &PolicySpec::kind)
      .def_readwrite("family", &PolicySpec::family)
      .def_readwrite("slcr", &PolicySpec::slcr)
      .def_readwrite("phi", &PolicySpec::phi)
      .def_readwrite("cap", &PolicySpec::cap)
      .def_readwrite("price", &PolicySpec::price)
      .def_readwrite("capacity_targets", &PolicySpec::capacity_targets);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("demand", &Scenario::demand)
      .def_readwrite("technologies", &Scenario::technologies)
      .def_readwrite("storages", &Scenario::storages)
      .def_readwrite("policy", &Scenario::policy)
      .def_readwrite("wrap_storage_level", &Scenario::wrap_storage_level)
      .def_readwrite("hours_per_year", &Scenario::hours_per_year)
      .def("validate", [](const Scenario& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const Violation& v : validate_scenario(s)) out.emplace_back(v.code, v.message);
        return out;
      });

  m.def(
      "default_scenario",
      [](int horizon, std::uint64_t seed, double round_trip) {
        DefaultAssumptions a;
        a.round_trip = round_trip;
        return default_scenario(horizon, seed, a);
      },
      py::arg("horizon") = 672, py::arg("seed") = 42, py::arg("round_trip") = 0.8);
  m.def(
      "load_config",
      [](const std::filesystem::path& path) { return io::load_config(path).scenario; },
      py::arg("path"), "Scenario described by an INI config file.");
  m.def("loss_coverage_factor", &loss_coverage_factor, py::arg("family"), py::arg("slcr"),
        py::arg("phi"));

  py::class_<Variant>(m, "Variant")
      .def_readonly("family", &Variant::family)
      .def_readonly("slcr", &Variant::slcr)
      .def_property_readonly("label", &Variant::label)
      .def("__repr__", [](const Variant& v) { return "<Variant " + v.label() + ">"; });
  m.def("all_variants", &all_variants);
  m.def("parse_variant", &parse_variant, py::arg("label"));

  py::enum_<CyclingType>(m, "CyclingType")
      .value("none", CyclingType::kNone)
      .value("equal", CyclingType::kEqual)
      .value("discharge_dominant", CyclingType::kDischargeDominant)
      .value("charge_dominant_high", CyclingType::kChargeDominantHigh)
      .value("charge_dominant_low", CyclingType::kChargeDominantLow);
  py::class_<CyclingEvent>(m, "CyclingEvent")
      .def_readonly("storage", &CyclingEvent::storage)
      .def_readonly("hour", &CyclingEvent::hour)
      .def_readonly("charge", &CyclingEvent::charge)
      .def_readonly("discharge", &CyclingEvent::discharge)
      .def_readonly("type", &CyclingEvent::type)
      .def_readonly("spc", &CyclingEvent::spc)
      .def_readonly("apc", &CyclingEvent::apc)
      .def_readonly("unintended_discharge", &CyclingEvent::unintended_discharge)
      .def_readonly("unintended_losses", &CyclingEvent::unintended_losses)
      .def_readonly("intended_charge", &CyclingEvent::intended_charge)
      .def_readonly("intended_discharge", &CyclingEvent::intended_discharge)
      .def_property_readonly("unintended_use", &CyclingEvent::unintended_use);
  m.def("decompose_cycling", &decompose_cycling, py::arg("charge"), py::arg("discharge"),
        py::arg("eta_rt"), py::arg("tol") = 1e-6);

  py::class_<CyclingReport>(m, "CyclingReport")
      .def_readonly("events", &CyclingReport::events)
      .def_readonly("hours", &CyclingReport::hours)
      .def_readonly("total_spc", &CyclingReport::total_spc)
      .def_readonly("total_apc", &CyclingReport::total_apc)
      .def_readonly("total_unintended_discharge", &CyclingReport::total_unintended_discharge)
      .def_readonly("total_losses", &CyclingReport::total_losses)
      .def_property_readonly("total_unintended_use", &CyclingReport::total_unintended_use);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("status",
                             [](const RunResult& r) {
                               return std::string(lp::to_string(r.solution.status));
                             })
      .def_property_readonly("optimal", [](const RunResult& r) { return r.solution.optimal(); })
      .def_property_readonly("objective", [](const RunResult& r) { return r.solution.objective; })
      .def_property_readonly("iterations",
                             [](const RunResult& r) { return r.solution.iterations; })
      .def_property_readonly("mu_policy", [](const RunResult& r) { return r.metrics.mu_policy; })
      .def_property_readonly("loss_factor",
                             [](const RunResult& r) { return r.metrics.loss_factor; })
      .def_property_readonly("prices",
                             [](const RunResult& r) {
                               std::vector<double> p;
                               for (const TaggedPrice& t : r.metrics.prices) p.push_back(t.price);
                               return p;
                             })
      .def_readonly("cycling", &RunResult::cycling)
      .def_readonly("scenario", &RunResult::scenario)
      .def_readonly("solve_seconds", &RunResult::solve_seconds)
      .def("to_json", [](const RunResult& r) { return io::results_json(r); })
      .def("write", &io::write_results, py::arg("directory"),
           "Writes results.json, dispatch.csv, rldc.csv and cycling.csv.");

  m.def(
      "solve",
      [](const Scenario& s, double cycling_tol) {
        py::gil_scoped_release release;
        return run_scenario(s, make_options(cycling_tol));
      },
      py::arg("scenario"), py::arg("cycling_tol") = 1e-6);

  m.def(
      "sweep",
      [](const Scenario& base, const std::string& axis, const std::vector<double>& grid,
         const std::vector<std::string>& variants, int threads) {
        SweepSpec spec;
        spec.base = base;
        spec.axis = parse_sweep_axis(axis);
        spec.grid = grid;
        spec.variants = to_variants(variants);
        SweepOptions opts;
        opts.threads = threads;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(spec, opts);
        }
        py::list out;
        for (const SweepRow& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("base"), py::arg("axis"), py::arg("grid"),
      py::arg("variants") = std::vector<std::string>{}, py::arg("threads") = 0,
      "Runs every (grid value, variant) cell; rows come back in grid-major order.");

  m.def(
      "calibrate",
      [](const Scenario& base, double target, const std::string& report_as, double tol) {
        CalibrationResult r;
        {
          py::gil_scoped_release release;
          r = calibrate_equivalent_target(base, target, parse_variant(report_as), tol);
        }
        py::dict d;
        d["phi"] = r.phi;
        d["share"] = r.share;
        d["mu"] = r.mu;
        py::list trace;
        for (const CalibrationStep& st : r.trace) trace.append(py::make_tuple(st.phi, st.share));
        d["trace"] = trace;
        return d;
      },
      py::arg("base"), py::arg("target"), py::arg("report_as") = "1b", py::arg("tol") = 1e-3);

  m.def(
      "factor_separation",
      [](const Scenario& base, double phi) {
        FactorSeparation sep;
        {
          py::gil_scoped_release release;
          sep = factor_separation(base, phi);
        }
        py::dict d;
        py::list labels, phis;
        for (const SeparationColumn& c : sep.columns) {
          labels.append(c.label);
          phis.append(c.phi);
        }
        d["columns"] = labels;
        d["phi"] = phis;
        py::dict values;
        for (const SeparationQuantity& q : sep.quantities) values[py::str(q.name)] = q.values;
        d["values"] = values;
        py::dict deltas;
        for (const auto& [name, arr] : sep.deltas) deltas[py::str(name)] = arr;
        d["deltas"] = deltas;
        return d;
      },
      py::arg("base"), py::arg("phi"));

  m.def(
      "oracle_solve",
      [](const Scenario& s) {
        const OracleResult r = brute_force_oracle(s);
        return py::make_tuple(std::string(lp::to_string(r.status)), r.objective);
      },
      py::arg("scenario"), "Dense reference solve for tiny scenarios (T <= 12).");

  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  py::register_exception<SweepError>(m, "SweepError", PyExc_ValueError);
  py::register_exception<io::ConfigError>(m, "ConfigError", PyExc_ValueError);
}
