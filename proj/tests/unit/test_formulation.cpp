#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "usc/formulation/build.hpp"
#include "usc/lp/kkt.hpp"
#include "usc/lp/solver.hpp"

namespace {

using namespace usc;
using lp::Sense;

double coef(const std::vector<lp::Term>& terms, int col) {
  for (const lp::Term& t : terms) {
    if (t.col == col) return t.value;
  }
  return 0.0;
}

TEST(Build, ColumnAndRowCounts) {
  const Scenario s = testkit::small_scenario(2);
  const auto [p, layout] = build_lp(s);
  // gas: 1 + 2, vre: 1 + 2 + 2, store: 3 + 3 * 2
  EXPECT_EQ(p.num_columns(), 17);
  EXPECT_EQ(layout.num_columns(), 17);
  // balance 2, limits 2 + 2, storage capacity 6, level 2
  EXPECT_EQ(p.num_rows(), 14);
  EXPECT_FALSE(layout.policy_row.has_value());
  EXPECT_TRUE(p.names().column("CU[vre][1]").has_value());
  EXPECT_TRUE(p.names().row("level[store][0]").has_value());
}

TEST(Build, LevelRowWrapsAndCarriesEfficiencies) {
  Scenario s = testkit::small_scenario(3, 0.64);
  s.storages[0].self_discharge = 0.99;
  const auto [p, layout] = build_lp(s);
  const StorageColumns& sc = layout.storages[0];
  const auto& row0 = p.row(sc.level_rows[0]);
  EXPECT_EQ(row0.sense, Sense::kEqual);
  EXPECT_DOUBLE_EQ(coef(row0.terms, sc.level[0]), 1.0);
  EXPECT_DOUBLE_EQ(coef(row0.terms, sc.level[2]), -0.99);
  EXPECT_NEAR(coef(row0.terms, sc.g_in[0]), -0.8, 1e-15);
  EXPECT_NEAR(coef(row0.terms, sc.g_out[0]), 1.25, 1e-15);

  s.wrap_storage_level = false;
  const auto [q, l2] = build_lp(s);
  EXPECT_DOUBLE_EQ(coef(q.row(l2.storages[0].level_rows[0]).terms, l2.storages[0].level[2]),
                   0.0);
}

TEST(Build, RejectsInvalidScenario) {
  Scenario s = testkit::small_scenario(2);
  s.demand[0] = -5.0;
  EXPECT_THROW(build_lp(s), FormulationError);
}

TEST(PolicyRow, WorkedExamples) {
  const Scenario s = testkit::small_scenario(2);
  const auto [p, layout] = build_lp(s);
  const std::vector<double> d = {100.0, 100.0};

  const PolicyRow a = policy_row(1, Slcr::kZero, 0.8, layout, d);
  EXPECT_EQ(a.sense, Sense::kGreaterEqual);
  EXPECT_DOUBLE_EQ(a.rhs, 160.0);
  EXPECT_DOUBLE_EQ(coef(a.terms, layout.techs[1].gen[0]), 1.0);
  EXPECT_DOUBLE_EQ(coef(a.terms, layout.techs[0].gen[0]), 0.0);
  EXPECT_DOUBLE_EQ(coef(a.terms, layout.storages[0].g_in[0]), 0.0);

  const PolicyRow b1 = policy_row(1, Slcr::kProportionate, 1.0, layout, d);
  const PolicyRow c1 = policy_row(1, Slcr::kComplete, 1.0, layout, d);
  EXPECT_EQ(b1.terms, c1.terms);
  EXPECT_DOUBLE_EQ(b1.rhs, c1.rhs);

  const PolicyRow c3 = policy_row(3, Slcr::kComplete, 0.8, layout, d);
  EXPECT_EQ(c3.sense, Sense::kLessEqual);
  EXPECT_NEAR(c3.rhs, 40.0, 1e-12);
  EXPECT_DOUBLE_EQ(coef(c3.terms, layout.techs[0].gen[1]), 1.0);

  const PolicyRow c1b = policy_row(1, Slcr::kComplete, 0.8, layout, d);
  EXPECT_DOUBLE_EQ(coef(c1b.terms, layout.storages[0].g_in[1]), -1.0);
  EXPECT_DOUBLE_EQ(coef(c1b.terms, layout.storages[0].g_out[1]), 1.0);

  EXPECT_THROW(policy_row(1, Slcr::kZero, 1.5, layout, d), FormulationError);
  EXPECT_THROW(policy_row(0, Slcr::kZero, 0.5, layout, d), FormulationError);
}

TEST(PolicyRow, GenerationFamiliesAreMirrorImages) {
  const Scenario s = testkit::small_scenario(3);
  const auto [p, layout] = build_lp(s);
  for (Slcr slcr : {Slcr::kZero, Slcr::kProportionate, Slcr::kComplete}) {
    const PolicyRow two = policy_row(2, slcr, 0.7, layout, s.demand);
    const PolicyRow four = policy_row(4, slcr, 0.7, layout, s.demand);
    ASSERT_EQ(two.terms.size(), four.terms.size());
    for (std::size_t i = 0; i < two.terms.size(); ++i) {
      EXPECT_EQ(two.terms[i].col, four.terms[i].col);
      EXPECT_NEAR(two.terms[i].value, -four.terms[i].value, 1e-15);
    }
    EXPECT_EQ(two.rhs, 0.0);
  }
}

TEST(PolicyRow, LossCoverageFactorsMatchRowCoefficients) {
  const Scenario s = testkit::small_scenario(2);
  const auto [p, layout] = build_lp(s);
  const double phi = 0.7;
  for (int family = 1; family <= 4; ++family) {
    for (Slcr slcr : {Slcr::kZero, Slcr::kProportionate, Slcr::kComplete}) {
      const PolicyRow row = policy_row(family, slcr, phi, layout, s.demand);
      // Written as h(x) >= 0, the storage discharge coefficient equals k.
      const double sign = family >= 3 ? -1.0 : 1.0;
      const double out_coef = sign * coef(row.terms, layout.storages[0].g_out[0]);
      EXPECT_NEAR(out_coef, loss_coverage_factor(family, slcr, phi), 1e-14)
          << variant_label(family, slcr);
    }
  }
  EXPECT_DOUBLE_EQ(loss_coverage_factor(1, Slcr::kProportionate, 0.7), 0.7);
  EXPECT_NEAR(loss_coverage_factor(3, Slcr::kProportionate, 0.7), -0.3, 1e-15);
  EXPECT_NEAR(loss_coverage_factor(2, Slcr::kComplete, 0.7), 0.3, 1e-15);
}

TEST(PolicyRow, OtherPolicies) {
  Scenario s = testkit::small_scenario(2);
  const auto [p, layout] = build_lp(s);
  const PolicyRow pot = potential_share_row(0.5, layout, s);
  EXPECT_DOUBLE_EQ(coef(pot.terms, layout.techs[1].capacity), 1.0);
  EXPECT_DOUBLE_EQ(pot.rhs, 100.0);
  EXPECT_FALSE(carbon_cap_row(lp::kInf, layout, s).has_value());
  const auto cap = carbon_cap_row(10.0, layout, s);
  ASSERT_TRUE(cap.has_value());
  EXPECT_DOUBLE_EQ(coef(cap->terms, layout.techs[0].gen[1]), 0.4);
  EXPECT_THROW(capacity_target_rows({{"gas", 1.0}}, layout), FormulationError);
  const auto tgt = capacity_target_rows({{"vre", 12.0}}, layout);
  ASSERT_EQ(tgt.size(), 1u);
  EXPECT_DOUBLE_EQ(tgt[0].second.rhs, 12.0);

  s.policy.kind = PolicyKind::kCarbonPrice;
  s.policy.price = 100.0;
  EXPECT_DOUBLE_EQ(effective_variable_costs(s)[0], 50.0 + 40.0);
  EXPECT_DOUBLE_EQ(effective_variable_costs(s)[1], 0.0);
}

TEST(Solve, ZeroDemandCostsNothing) {
  Scenario s = testkit::small_scenario(4);
  std::fill(s.demand.begin(), s.demand.end(), 0.0);
  s.policy = PolicySpec::renewable_share(1, Slcr::kComplete, 0.5);
  const auto [p, layout] = build_lp(s);
  const lp::Solution sol = lp::solve(p);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, 0.0, 1e-9);
}

TEST(Solve, EveryVariantPassesKkt) {
  for (int family = 1; family <= 4; ++family) {
    for (Slcr slcr : {Slcr::kZero, Slcr::kProportionate, Slcr::kComplete}) {
      Scenario s = testkit::small_scenario(8);
      s.policy = PolicySpec::renewable_share(family, slcr, 0.85);
      const auto [p, layout] = build_lp(s);
      const lp::Solution sol = lp::solve(p);
      ASSERT_TRUE(sol.optimal()) << variant_label(family, slcr);
      const lp::KktReport k = lp::check_kkt(p, sol);
      EXPECT_TRUE(k.passed()) << variant_label(family, slcr);
      EXPECT_LE(k.duality_gap, 1e-8);
      EXPECT_GE(policy_multiplier(sol, layout, s.policy), -1e-9);
    }
  }
}

}  // namespace
