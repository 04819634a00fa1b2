#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "usc/lp/kkt.hpp"
#include "usc/lp/mps.hpp"
#include "usc/lp/problem.hpp"
#include "usc/lp/solver.hpp"

namespace {

using usc::lp::check_kkt;
using usc::lp::kInf;
using usc::lp::LpProblem;
using usc::lp::Sense;
using usc::lp::Solution;
using usc::lp::Status;
using usc::lp::Term;

TEST(LpProblem, CanonicalizeMergesAndDropsZeros) {
  auto t = usc::lp::canonicalize({{2, 1.0}, {0, 3.0}, {2, -1.0}, {1, 0.5}, {0, 1.0}});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (Term{0, 4.0}));
  EXPECT_EQ(t[1], (Term{1, 0.5}));
}

TEST(LpProblem, ValidateRejectsBadInput) {
  LpProblem dangling;
  dangling.add_column("x");
  dangling.add_row("r", {{3, 1.0}}, Sense::kEqual, 1.0);
  EXPECT_THROW(dangling.validate(), usc::lp::InvalidProblemError);

  LpProblem crossed;
  crossed.add_column("x");
  crossed.set_bounds(0, 2.0, 1.0);
  EXPECT_THROW(crossed.validate(), usc::lp::InvalidProblemError);
  EXPECT_THROW(crossed.add_column("x"), usc::lp::InvalidProblemError);
}

TEST(Simplex, SingleVariableLowerBoundRow) {
  LpProblem p;
  const int x = p.add_column("x", 1.0);
  p.add_row("r", {{x, 1.0}}, Sense::kGreaterEqual, 3.0);
  const Solution s = usc::lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.primal[0], 3.0, 1e-12);
  EXPECT_NEAR(s.objective, 3.0, 1e-12);
  EXPECT_NEAR(s.dual[0], 1.0, 1e-12);
}

TEST(Simplex, DetectsInfeasibility) {
  LpProblem p;
  const int x = p.add_column("x", -1.0, -kInf, kInf);
  p.add_row("le", {{x, 1.0}}, Sense::kLessEqual, 0.0);
  p.add_row("ge", {{x, 1.0}}, Sense::kGreaterEqual, 1.0);
  EXPECT_EQ(usc::lp::solve(p).status, Status::kInfeasible);
}

TEST(Simplex, DetectsUnboundedness) {
  LpProblem p;
  const int x = p.add_column("x", -1.0);
  p.add_row("r", {{x, 1.0}}, Sense::kGreaterEqual, 0.0);
  EXPECT_EQ(usc::lp::solve(p).status, Status::kUnbounded);
}

TEST(Simplex, LessEqualDualIsNonPositive) {
  // max x + y  s.t. x + 2y <= 4, 3x + y <= 6
  LpProblem p;
  const int x = p.add_column("x", -1.0);
  const int y = p.add_column("y", -1.0);
  p.add_row("a", {{x, 1.0}, {y, 2.0}}, Sense::kLessEqual, 4.0);
  p.add_row("b", {{x, 3.0}, {y, 1.0}}, Sense::kLessEqual, 6.0);
  const Solution s = usc::lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.primal[0], 1.6, 1e-10);
  EXPECT_NEAR(s.primal[1], 1.2, 1e-10);
  EXPECT_NEAR(s.dual[0], -0.4, 1e-10);
  EXPECT_NEAR(s.dual[1], -0.2, 1e-10);
  EXPECT_TRUE(check_kkt(p, s).passed());
}

TEST(Simplex, BoundedAndFreeColumns) {
  LpProblem p;
  const int x = p.add_column("x", -2.0, -1.0, 5.0);
  const int y = p.add_column("y", 1.0, -kInf, kInf);
  p.add_row("link", {{x, 1.0}, {y, -1.0}}, Sense::kLessEqual, 2.0);
  const Solution s = usc::lp::solve(p);
  ASSERT_EQ(s.status, Status::kOptimal);
  EXPECT_NEAR(s.primal[0], 5.0, 1e-10);
  EXPECT_NEAR(s.primal[1], 3.0, 1e-10);
  EXPECT_NEAR(s.objective, -7.0, 1e-10);
  EXPECT_TRUE(check_kkt(p, s).passed());
}

// Standard-form instance min c'x, Ax = b, x >= 0, feasible and bounded by
// construction.
struct StandardLp {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

StandardLp random_standard_lp(std::mt19937_64& rng, int m, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 1.0);
  StandardLp lp{Eigen::MatrixXd(m, n), Eigen::VectorXd(m), Eigen::VectorXd(n)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) lp.a(i, j) = u(rng);
  Eigen::VectorXd x0(n), y0(m), z0(n);
  for (int j = 0; j < n; ++j) x0[j] = pos(rng);
  for (int i = 0; i < m; ++i) y0[i] = u(rng);
  for (int j = 0; j < n; ++j) z0[j] = pos(rng);
  lp.b = lp.a * x0;
  lp.c = lp.a.transpose() * y0 + z0;
  return lp;
}

// Enumerates every basis and returns the best objective among the basic
// feasible solutions.
double vertex_enumeration(const StandardLp& lp) {
  const int m = static_cast<int>(lp.a.rows());
  const int n = static_cast<int>(lp.a.cols());
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + m, 1);
  std::sort(pick.begin(), pick.end());
  double best = kInf;
  Eigen::MatrixXd basis(m, m);
  std::vector<int> cols(m);
  do {
    int k = 0;
    for (int j = 0; j < n; ++j)
      if (pick[j]) cols[k++] = j;
    for (int q = 0; q < m; ++q) basis.col(q) = lp.a.col(cols[q]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd xb = lu.solve(lp.b);
    if (xb.minCoeff() < -1e-9) continue;
    double obj = 0.0;
    for (int q = 0; q < m; ++q) obj += lp.c[cols[q]] * xb[q];
    best = std::min(best, obj);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

LpProblem to_problem(const StandardLp& lp) {
  LpProblem p;
  for (int j = 0; j < lp.a.cols(); ++j) p.add_column("x" + std::to_string(j), lp.c[j]);
  for (int i = 0; i < lp.a.rows(); ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < lp.a.cols(); ++j) terms.push_back({j, lp.a(i, j)});
    p.add_row("r" + std::to_string(i), terms, Sense::kEqual, lp.b[i]);
  }
  return p;
}

TEST(Simplex, MatchesVertexEnumerationOnRandomLps) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 5; ++trial) {
    const StandardLp lp = random_standard_lp(rng, 12, 20);
    const double oracle = vertex_enumeration(lp);
    const LpProblem p = to_problem(lp);
    const Solution s = usc::lp::solve(p);
    ASSERT_EQ(s.status, Status::kOptimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, oracle, 1e-8 * (1.0 + std::abs(oracle)))
        << "trial " << trial;
    const auto rep = check_kkt(p, s);
    EXPECT_TRUE(rep.passed()) << "trial " << trial;
    EXPECT_LE(rep.duality_gap, 1e-8);
  }
}

TEST(Simplex, RandomInequalityLpsPassKkt) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> sense_pick(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const StandardLp base = random_standard_lp(rng, 8, 15);
    LpProblem p;
    for (int j = 0; j < 15; ++j) {
      const double up = (j % 3 == 0) ? 2.0 : kInf;
      p.add_column("x" + std::to_string(j), base.c[j], 0.0, up);
    }
    for (int i = 0; i < 8; ++i) {
      std::vector<Term> terms;
      double act = 0.0;
      for (int j = 0; j < 15; ++j) {
        terms.push_back({j, base.a(i, j)});
      }
      // rhs from an interior point keeps every instance feasible.
      for (int j = 0; j < 15; ++j) act += base.a(i, j) * 0.5;
      const int s = sense_pick(rng);
      const Sense sense = s == 0 ? Sense::kLessEqual
                                 : (s == 1 ? Sense::kEqual : Sense::kGreaterEqual);
      const double shift = s == 0 ? 0.3 : (s == 2 ? -0.3 : 0.0);
      p.add_row("r" + std::to_string(i), terms, sense, act + shift);
    }
    const Solution sol = usc::lp::solve(p);
    if (sol.status != Status::kOptimal) continue;
    const auto rep = check_kkt(p, sol);
    EXPECT_TRUE(rep.passed()) << "trial " << trial << " stat=" << rep.stationarity
                              << " pf=" << rep.primal_feas << " df=" << rep.dual_feas
                              << " cs=" << rep.comp_slack;
    EXPECT_LE(rep.duality_gap, 1e-8);
    for (int i = 0; i < p.num_rows(); ++i) {
      if (p.row(i).sense == Sense::kGreaterEqual) EXPECT_GE(sol.dual[i], -1e-9);
      if (p.row(i).sense == Sense::kLessEqual) EXPECT_LE(sol.dual[i], 1e-9);
    }
  }
}

TEST(Simplex, IsDeterministic) {
  std::mt19937_64 rng(99);
  const LpProblem p = to_problem(random_standard_lp(rng, 10, 18));
  const Solution a = usc::lp::solve(p);
  const Solution b = usc::lp::solve(p);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.dual, b.dual);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Kkt, PerturbedPrimalIsFlagged) {
  LpProblem p;
  const int x = p.add_column("x", 1.0);
  const int y = p.add_column("y", 2.0);
  p.add_row("cover", {{x, 1.0}, {y, 1.0}}, Sense::kGreaterEqual, 4.0);
  p.add_row("cap", {{x, 1.0}}, Sense::kLessEqual, 3.0);
  Solution s = usc::lp::solve(p);
  ASSERT_TRUE(s.optimal());
  ASSERT_TRUE(check_kkt(p, s).passed());
  s.primal[1] += 1e-2;
  const auto rep = check_kkt(p, s);
  EXPECT_GT(std::max(rep.primal_feas, rep.comp_slack), 1e-3);
  EXPECT_FALSE(rep.passed());
}

TEST(Kkt, ZeroedDualsGiveMaxBasicCost) {
  // Both columns end strictly inside their bounds (basic), so stationarity
  // with y = 0 is max |c_j| over them.
  LpProblem p;
  const int x = p.add_column("x", 3.0);
  const int y = p.add_column("y", 5.0);
  p.add_row("a", {{x, 1.0}, {y, 1.0}}, Sense::kGreaterEqual, 4.0);
  p.add_row("b", {{x, 1.0}, {y, -1.0}}, Sense::kEqual, 2.0);
  Solution s = usc::lp::solve(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.primal[0], 3.0, 1e-12);
  EXPECT_NEAR(s.primal[1], 1.0, 1e-12);
  std::fill(s.dual.begin(), s.dual.end(), 0.0);
  EXPECT_DOUBLE_EQ(check_kkt(p, s).stationarity, 5.0);
}

TEST(Mps, FreeFormatRoundTrip) {
  LpProblem p;
  const int x = p.add_column("x", 1.5, 0.0, 4.0);
  const int y = p.add_column("y", -2.0, -kInf, kInf);
  const int z = p.add_column("z", 0.0, 1.0, 1.0);
  p.add_row("r1", {{x, 1.0}, {y, 2.0}}, Sense::kLessEqual, 7.0);
  p.add_row("r2", {{y, -1.0}, {z, 3.0}}, Sense::kGreaterEqual, -2.0);
  p.add_row("r3", {{x, 1.0}, {z, 1.0}}, Sense::kEqual, 2.0);
  std::stringstream ss;
  usc::lp::write_mps(p, ss);
  const LpProblem q = usc::lp::read_mps(ss);
  ASSERT_EQ(q.num_columns(), 3);
  ASSERT_EQ(q.num_rows(), 3);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(q.objective()[j], p.objective()[j]);
    EXPECT_EQ(q.lower()[j], p.lower()[j]);
    EXPECT_EQ(q.upper()[j], p.upper()[j]);
  }
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(q.row(i).terms, p.row(i).terms);
    EXPECT_EQ(q.row(i).sense, p.row(i).sense);
    EXPECT_EQ(q.row(i).rhs, p.row(i).rhs);
  }
}

TEST(Mps, FixedFormatUsesColumnPositions) {
  LpProblem p;
  const int x = p.add_column("a_long_semantic_name", 1.0);
  p.add_row("row", {{x, 2.0}}, Sense::kGreaterEqual, 1.0);
  std::stringstream ss;
  usc::lp::write_mps(p, ss, usc::lp::MpsFormat::kFixed);
  const std::string text = ss.str();
  EXPECT_NE(text.find("    C0000001  R0000001             2\n"), std::string::npos)
      << text;
  EXPECT_NE(text.find(" G  R0000001\n"), std::string::npos);
  EXPECT_NE(text.find("ENDATA\n"), std::string::npos);
}

}  // namespace
