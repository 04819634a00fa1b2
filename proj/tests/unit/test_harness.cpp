#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "usc/harness/harness.hpp"
#include "usc/model/costs.hpp"

namespace {

using namespace usc;

TEST(Variants, AllTwelveInOrder) {
  const auto v = all_variants();
  ASSERT_EQ(v.size(), 12u);
  EXPECT_EQ(v.front().label(), "1a");
  EXPECT_EQ(v[5].label(), "2c");
  EXPECT_EQ(v.back().label(), "4c");
  EXPECT_EQ(parse_variant("3b"), (Variant{3, Slcr::kProportionate}));
  EXPECT_THROW(parse_variant("5a"), std::invalid_argument);
  EXPECT_THROW(parse_variant("1d"), std::invalid_argument);
}

TEST(Sweep, ApplyAxis) {
  const Scenario base = testkit::small_scenario(4);
  const Variant v{2, Slcr::kZero};
  EXPECT_DOUBLE_EQ(apply_axis(base, SweepAxis::kPhi, 0.6, v).policy.phi, 0.6);
  EXPECT_EQ(apply_axis(base, SweepAxis::kPhi, 0.6, v).policy.family, 2);
  EXPECT_NEAR(apply_axis(base, SweepAxis::kEtaRt, 0.49, v).storages[0].eta_in, 0.7, 1e-15);
  const Scenario vc = apply_axis(base, SweepAxis::kStorageVarCost, 3.0, v);
  EXPECT_EQ(vc.storages[0].var_charge_cost, 3.0);
  EXPECT_EQ(vc.storages[0].var_discharge_cost, 3.0);
  EXPECT_EQ(apply_axis(base, SweepAxis::kResVarCost, 2.0, v).technologies[1].variable_cost, 2.0);
  EXPECT_EQ(apply_axis(base, SweepAxis::kResVarCost, 2.0, v).technologies[0].variable_cost, 50.0);
  EXPECT_EQ(apply_axis(base, SweepAxis::kCurtailmentCost, 4.0, v).technologies[1].curtailment_cost,
            4.0);
  EXPECT_EQ(parse_sweep_axis("eta_rt"), SweepAxis::kEtaRt);
  EXPECT_THROW(parse_sweep_axis("eta"), SweepError);
}

TEST(Sweep, RowsAreOrderedAndIndependentOfThreading) {
  SweepSpec spec;
  spec.base = testkit::small_scenario(6);
  spec.axis = SweepAxis::kPhi;
  spec.grid = {0.2, 0.5, 0.8, 0.95};
  spec.variants = {{1, Slcr::kZero}, {1, Slcr::kComplete}, {3, Slcr::kProportionate}};

  int streamed = 0;
  SweepOptions serial;
  serial.threads = 1;
  serial.on_row = [&](const SweepRow&) { ++streamed; };
  const auto a = run_sweep(spec, serial);
  SweepOptions parallel;
  parallel.threads = 4;
  const auto b = run_sweep(spec, parallel);

  EXPECT_EQ(streamed, 12);
  ASSERT_EQ(a.size(), 12u);
  ASSERT_EQ(b.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].grid_index, static_cast<int>(i / 3));
    EXPECT_EQ(a[i].variant_index, static_cast<int>(i % 3));
    EXPECT_EQ(a[i].status, b[i].status);
    EXPECT_EQ(a[i].objective, b[i].objective);
    EXPECT_EQ(a[i].cycling_energy, b[i].cycling_energy);
    EXPECT_EQ(a[i].capacities, b[i].capacities);
  }
}

TEST(Sweep, InfeasibleCellsBecomeRows) {
  SweepSpec spec;
  spec.base = testkit::small_scenario(4);
  spec.base.technologies[1].availability.assign(4, 0.0);
  spec.axis = SweepAxis::kPhi;
  spec.grid = {0.0, 0.5};
  spec.variants = {{1, Slcr::kZero}};
  const auto rows = run_sweep(spec);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].status, "optimal");
  EXPECT_EQ(rows[1].status, "infeasible");
}

TEST(Sweep, FlagsIndifferentStorageAndRejectsBadSpecs) {
  SweepSpec spec;
  spec.base = testkit::small_scenario(4);
  spec.base.policy.phi = 0.5;
  spec.axis = SweepAxis::kStorageVarCost;
  spec.grid = {0.0, 1.0};
  spec.variants = {{1, Slcr::kComplete}};
  const auto rows = run_sweep(spec);
  EXPECT_TRUE(rows[0].indeterminate);
  EXPECT_FALSE(rows[1].indeterminate);

  spec.grid = {1.0, 1.0};
  EXPECT_THROW(run_sweep(spec), SweepError);
  spec.grid = {1.0};
  spec.variants.clear();
  EXPECT_THROW(run_sweep(spec), SweepError);
}

TEST(Sweep, ThreadCapFromEnvironment) {
  ::setenv("USC_LAB_THREADS", "2", 1);
  EXPECT_EQ(harness_threads(8), 2);
  EXPECT_EQ(harness_threads(1), 1);
  ::setenv("USC_LAB_THREADS", "junk", 1);
  EXPECT_EQ(harness_threads(3), 3);
  ::unsetenv("USC_LAB_THREADS");
}

TEST(Harness, ArgminInvariantUnderCostScaling) {
  Scenario s = default_scenario(48, 5);
  s.policy = PolicySpec::renewable_share(1, Slcr::kProportionate, 0.7);
  Scenario scaled = s;
  const double f = 3.0;
  for (Technology& t : scaled.technologies) {
    t.capacity_cost *= f;
    t.variable_cost *= f;
    t.curtailment_cost *= f;
  }
  for (Storage& st : scaled.storages) {
    st.charge_cost *= f;
    st.discharge_cost *= f;
    st.energy_cost *= f;
    st.var_charge_cost *= f;
    st.var_discharge_cost *= f;
  }
  const RunResult a = run_scenario(s);
  const RunResult b = run_scenario(scaled);
  ASSERT_TRUE(a.solution.optimal());
  ASSERT_TRUE(b.solution.optimal());
  EXPECT_NEAR(b.solution.objective, f * a.solution.objective, 1e-9 * b.solution.objective);
  for (std::size_t k = 0; k < a.layout.techs.size(); ++k) {
    const double ca = a.solution.primal[a.layout.techs[k].capacity];
    const double cb = b.solution.primal[b.layout.techs[k].capacity];
    EXPECT_NEAR(ca, cb, 1e-6 * (1.0 + ca)) << a.layout.techs[k].name;
  }
  EXPECT_NEAR(b.metrics.mu_policy, f * a.metrics.mu_policy, 1e-6 * (1.0 + b.metrics.mu_policy));
}

class Calibration : public ::testing::Test {
 protected:
  static Scenario base() {
    Scenario s = default_scenario(168, 42);
    s.policy = PolicySpec::renewable_share(1, Slcr::kComplete, 0.8);
    return s;
  }
};

TEST_F(Calibration, ProportionateTargetNeedsLowerPhi) {
  const CalibrationResult r =
      calibrate_equivalent_target(base(), 0.8, {1, Slcr::kProportionate});
  EXPECT_LT(r.phi, 0.8);
  EXPECT_NEAR(r.share, 0.8, 1e-3);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_DOUBLE_EQ(r.trace.front().phi, 0.8);
  EXPECT_DOUBLE_EQ(r.trace.back().phi, r.phi);
  EXPECT_LE(r.trace.size(), 32u);
  // The last step is the first one inside the tolerance band.
  for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
    EXPECT_GT(std::abs(r.trace[i].share - 0.8), 1e-3);
  }
}

TEST_F(Calibration, UnreachableLowTargetIsReported) {
  // Without any renewables the complete-SLCR row still forces them to cover
  // storage losses, so a zero share cannot be matched.
  try {
    calibrate_equivalent_target(base(), 0.0, {1, Slcr::kProportionate});
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& e) {
    EXPECT_NE(std::string(e.what()).find("down to phi=0"), std::string::npos) << e.what();
  }
}

TEST_F(Calibration, RejectsNonCompleteBase) {
  Scenario s = base();
  s.policy.slcr = Slcr::kZero;
  EXPECT_THROW(calibrate_equivalent_target(s, 0.8, {1, Slcr::kZero}), CalibrationError);
  EXPECT_THROW(calibrate_equivalent_target(base(), 0.8, {1, Slcr::kZero}, 1e-3, 0),
               CalibrationError);
}

double column_total(const FactorSeparation& sep, const std::string& prefix, int col) {
  double s = 0.0;
  for (const SeparationQuantity& q : sep.quantities) {
    if (q.name.rfind(prefix, 0) == 0) s += q.values[col];
  }
  return s;
}

TEST(FactorSeparation, FiveRunsBalanceEnergy) {
  Scenario s = default_scenario(168, 42);
  s.policy = PolicySpec::renewable_share(1, Slcr::kComplete, 0.8);
  const FactorSeparation sep = factor_separation(s, 0.8);
  ASSERT_EQ(sep.columns.size(), 5u);
  EXPECT_EQ(sep.columns[0].variant.slcr, Slcr::kZero);
  EXPECT_EQ(sep.columns[2].variant.slcr, Slcr::kProportionate);
  EXPECT_LE(sep.columns[1].phi, 0.8);
  EXPECT_LE(sep.columns[3].phi, 0.8);
  EXPECT_DOUBLE_EQ(sep.columns[4].phi, 0.8);
  const double demand = sep.columns[0].run.metrics.totals.demand;
  for (int c = 0; c < 5; ++c) {
    const double gen = column_total(sep, "generation.", c);
    const double losses = column_total(sep, "storage_losses", c);
    EXPECT_NEAR(gen - losses, demand, 1e-6 * demand);
  }
  ASSERT_EQ(sep.deltas.size(), sep.quantities.size());
  for (int d = 0; d < 4; ++d) {
    double dgen = 0.0, dloss = 0.0;
    for (const auto& [name, delta] : sep.deltas) {
      if (name.rfind("generation.", 0) == 0) dgen += delta[d];
      if (name == "storage_losses") dloss = delta[d];
    }
    EXPECT_NEAR(dgen, dloss, 1e-6 * demand);
  }
}

TEST(FactorSeparation, WithoutStorageAllRunsCoincide) {
  Scenario s = default_scenario(48, 42);
  s.storages.clear();
  const FactorSeparation sep = factor_separation(s, 0.6);
  for (const SeparationQuantity& q : sep.quantities) {
    for (int c = 1; c < 5; ++c) {
      EXPECT_NEAR(q.values[c], q.values[0], 1e-6 * (1.0 + std::abs(q.values[0]))) << q.name;
    }
  }
}

TEST(Oracle, MatchesMainSolverOnRandomTinyInstances) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 25; ++i) {
    const Scenario s = testkit::random_tiny(rng);
    const OracleResult o = brute_force_oracle(s);
    const RunResult r = run_scenario(s);
    ASSERT_EQ(o.status, r.solution.status) << "instance " << i;
    if (!r.solution.optimal()) continue;
    EXPECT_LE(std::abs(o.objective - r.solution.objective), 1e-8 * (1.0 + std::abs(o.objective)))
        << "instance " << i;
  }
}

TEST(Oracle, TrivialCasesAndLimits) {
  Scenario zero = testkit::small_scenario(3);
  std::fill(zero.demand.begin(), zero.demand.end(), 0.0);
  EXPECT_EQ(brute_force_oracle(zero).objective, 0.0);

  // Surplus forced by a high target: zero SLCR can hide it in losses.
  Scenario a = testkit::small_scenario(6, 0.6);
  a.policy = PolicySpec::renewable_share(1, Slcr::kZero, 0.9);
  Scenario c = a;
  c.policy.slcr = Slcr::kComplete;
  EXPECT_LE(brute_force_oracle(a).objective, brute_force_oracle(c).objective + 1e-9);

  EXPECT_THROW(brute_force_oracle(testkit::small_scenario(13)), std::invalid_argument);
  Scenario three = testkit::small_scenario(3);
  three.technologies.push_back(three.technologies[0]);
  three.technologies.back().name = "gas2";
  EXPECT_THROW(brute_force_oracle(three), std::invalid_argument);
}

TEST(Oracle, DenseTableauOnHandLp) {
  // min x + 2y  s.t.  x + y >= 2,  x <= 1  ->  x = 1, y = 1, obj 3.
  lp::LpProblem p;
  p.add_column("x", 1.0);
  p.add_column("y", 2.0);
  p.add_row("r0", {{0, 1.0}, {1, 1.0}}, lp::Sense::kGreaterEqual, 2.0);
  p.add_row("r1", {{0, 1.0}}, lp::Sense::kLessEqual, 1.0);
  const OracleResult r = dense_tableau_solve(p);
  EXPECT_EQ(r.status, lp::Status::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-12);

  lp::LpProblem unbounded;
  unbounded.add_column("x", -1.0);
  EXPECT_EQ(dense_tableau_solve(unbounded).status, lp::Status::kUnbounded);

  lp::LpProblem infeasible;
  infeasible.add_column("x", 1.0);
  infeasible.add_row("r", {{0, 1.0}}, lp::Sense::kLessEqual, -1.0);
  EXPECT_EQ(dense_tableau_solve(infeasible).status, lp::Status::kInfeasible);
}

}  // namespace
