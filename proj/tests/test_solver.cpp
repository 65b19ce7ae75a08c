#include <gtest/gtest.h>

#include <random>

#include "lot/error.hpp"
#include "lot/oracle.hpp"
#include "lot/solver.hpp"
#include "support.hpp"

namespace lot {
namespace {

using test::dirac1;
using test::kPi;
using test::line;

SolverConfig config(double eps, double kappa = 1.0) {
  SolverConfig c;
  c.epsilon_target = eps;
  c.kappa = kappa;
  return c;
}

SolveResult hk(const DiscreteMeasure& a, const DiscreteMeasure& b, double kappa, double eps) {
  return sinkhorn_hk(build_cost_hk(a, b, kappa), a, b, config(eps, kappa));
}

TEST(Cost, W2) {
  EXPECT_DOUBLE_EQ(build_cost_w2(dirac1(0), dirac1(3))(0, 0), 9.0);
  const DiscreteMeasure a = line({0, 1, 2}, {1, 1, 1}), b = line({0.5, 4}, {1, 1});
  EXPECT_EQ(build_cost_w2(a, a).diagonal(), Eigen::Vector3d::Zero());
  EXPECT_EQ(build_cost_w2(a, b), build_cost_w2(b, a).transpose());
}

TEST(Cost, HkTruncation) {
  EXPECT_DOUBLE_EQ(hk_cost(0.0, 1.0), 0.0);
  // -2 log cos(pi / 3) = 2 log 2.
  EXPECT_NEAR(hk_cost(kPi / 3, 1.0), 1.3862943611198906, 1e-12);
  EXPECT_TRUE(std::isinf(hk_cost(kPi / 2, 1.0)));
  EXPECT_TRUE(std::isinf(build_cost_hk(dirac1(0), dirac1(2), 1.0)(0, 0)));
  EXPECT_NEAR(build_cost_hk(dirac1(0), dirac1(2), 2.0)(0, 0), -8.0 * std::log(std::cos(1.0)), 1e-12);
}

TEST(Balanced, IdenticalMeasuresHaveZeroCost) {
  const DiscreteMeasure a = line({0, 0.3, 0.7, 1}, {0.25, 0.25, 0.25, 0.25});
  const double eps = 1e-4;
  const SolveResult r = sinkhorn_balanced(build_cost_w2(a, a), a, a, config(eps));
  EXPECT_LT(r.plan.value, 10 * eps);
  EXPECT_LT((r.plan.first_marginal() - a.masses()).lpNorm<1>(), 1e-8);
}

TEST(Balanced, DiracShift) {
  const SolveResult r = sinkhorn_balanced(build_cost_w2(dirac1(0), dirac1(3)), dirac1(0), dirac1(3), config(1e-4));
  EXPECT_NEAR(r.plan.value, 9.0, 1e-4);
}

TEST(Balanced, MatchesPermutationOracle) {
  const DiscreteMeasure a = line({0, 1}, {0.5, 0.5}), b = line({2, 3}, {0.5, 0.5});
  const double eps = 1e-4;
  const SolveResult r = sinkhorn_balanced(build_cost_w2(a, b), a, b, config(eps));
  EXPECT_NEAR(r.plan.value, oracle::exact_balanced(a, b, build_cost_w2(a, b)).value, 5 * eps);
}

TEST(Balanced, RejectsMassMismatch) {
  EXPECT_THROW(sinkhorn_balanced(build_cost_w2(dirac1(0), dirac1(1, 2.0)), dirac1(0), dirac1(1, 2.0), config(1e-3)),
               InvalidInputError);
}

TEST(Balanced, ReportsNonConvergence) {
  const DiscreteMeasure a = line({0, 0.1, 0.2, 0.3}, {0.1, 0.2, 0.3, 0.4}), b = line({1, 1.2, 1.3}, {0.3, 0.3, 0.4});
  SolverConfig c = config(1e-5);
  c.max_iters = 2;
  c.epsilon_scaling_factor = 1e-9;  // no warm start from coarser stages
  EXPECT_THROW(sinkhorn_balanced(build_cost_w2(a, b), a, b, c), ConvergenceError);
}

TEST(SoftMarginal, DiracPlanMass) {
  for (auto [m0, m1, d] : {std::tuple{1.0, 1.0, 0.5}, {2.0, 0.5, 1.0}, {0.3, 1.7, 1.4}}) {
    const SolveResult r = hk(dirac1(0, m0), dirac1(d, m1), 1.0, 1e-5);
    const auto ref = test::dirac_reference(m0, m1, d, 1.0);
    EXPECT_NEAR(r.plan.mass(), ref.plan_mass, 1e-3);
    EXPECT_NEAR(r.plan.value, ref.value, 1e-3);
  }
}

TEST(SoftMarginal, BeyondRangeNothingMoves) {
  const SolveResult r = hk(dirac1(0, 1.5), dirac1(2, 0.5), 1.0, 1e-4);
  EXPECT_LT(r.plan.mass(), 1e-3);
  EXPECT_NEAR(r.plan.value, 2.0, 1e-3);
}

TEST(SoftMarginal, NotBelowGridSearch) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0.0, 1.2), mass(0.3, 1.5);
  const double eps = 1e-4;
  for (int seed = 0; seed < 20; ++seed) {
    const DiscreteMeasure a = line({pos(rng), pos(rng)}, {mass(rng), mass(rng)});
    const DiscreteMeasure b = line({pos(rng), pos(rng)}, {mass(rng), mass(rng)});
    const double best = oracle::hk_grid_search(a, b, 1.0).value;
    const SolveResult r = hk(a, b, 1.0, eps);
    EXPECT_GE(r.plan.value, best - 5 * eps);
    EXPECT_LE(r.plan.value, best + 5 * eps * (a.total_mass() + b.total_mass()));
  }
}

TEST(SoftMarginal, DualityGap) {
  const DiscreteMeasure a = line({0, 0.4, 0.9}, {0.2, 0.5, 0.3}), b = line({0.2, 1.1}, {0.6, 0.7});
  const double eps = 1e-4;
  const SolveResult r = hk(a, b, 1.0, eps);
  const double gap = r.plan.value - dual_value(r.potentials, a, b);
  EXPECT_LE(std::abs(gap), 10 * eps * (a.total_mass() + b.total_mass()));
}

TEST(PrimalValue, Cases) {
  const DiscreteMeasure a = line({0, 1}, {0.4, 0.6}), b = line({0.5}, {1.2});
  EXPECT_NEAR(primal_value_hk(Eigen::MatrixXd::Zero(2, 1), a, b, 2.0), 4.0 * 2.2, 1e-12);
  const double d = 0.8, c = std::cos(d);
  Eigen::MatrixXd p(1, 1);
  p << std::sqrt(2.0 * 0.5) * c;
  EXPECT_NEAR(primal_value_hk(p, dirac1(0, 2.0), dirac1(d, 0.5), 1.0), 2.5 - 2.0 * c, 1e-12);
  EXPECT_TRUE(std::isinf(primal_value_hk(Eigen::MatrixXd::Ones(1, 1), dirac1(0), dirac1(2), 1.0)));
  Eigen::MatrixXd q(2, 1);
  q << 0.3, 0.2;
  EXPECT_NEAR(primal_value_hk(q, a, b, 1.0), test::hk_energy_line(q, a, b, 1.0), 1e-12);
}

TEST(SoftMarginal, Properties) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(0.0, 2.0), mass(0.2, 1.0);
  auto random_measure = [&](int n) {
    std::vector<double> x(n), m(n);
    for (int i = 0; i < n; ++i) {
      x[i] = pos(rng);
      m[i] = mass(rng);
    }
    return line(x, m);
  };
  const double eps = 1e-4;
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteMeasure a = random_measure(3), b = random_measure(4), c = random_measure(2);
    const double ab = hk(a, b, 1.0, eps).plan.value;
    EXPECT_LE(ab, a.total_mass() + b.total_mass() + 1e-12);
    EXPECT_NEAR(ab, hk(b, a, 1.0, eps).plan.value, 1e-6);
    const double bc = hk(b, c, 1.0, eps).plan.value, ac = hk(a, c, 1.0, eps).plan.value;
    EXPECT_LE(std::sqrt(ac), std::sqrt(ab) + std::sqrt(bc) + 10 * eps);
  }
}

TEST(SoftMarginal, MonotoneInKappaUpToW2) {
  const DiscreteMeasure a = line({0, 0.5}, {0.5, 0.5}), b = line({0.3, 1.0}, {0.5, 0.5});
  const double w2 = oracle::exact_balanced(a, b, build_cost_w2(a, b)).value;
  double prev = 0.0;
  for (double kappa : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double v = oracle::hk_grid_search(a, b, kappa).value;
    EXPECT_GE(v, prev - 1e-9);
    EXPECT_LE(v, w2 + 1e-9);
    prev = v;
  }
}

TEST(SoftMarginal, KappaScaling) {
  // HK_kappa(mu, nu) = kappa HK_1(mu / kappa, nu / kappa) on the line.
  const double kappa = 2.5, eps = 1e-6;
  const DiscreteMeasure a = line({0, 1.0}, {0.7, 0.4}), b = line({0.6, 2.2}, {0.5, 0.9});
  const DiscreteMeasure as = line({0, 1.0 / kappa}, {0.7, 0.4}), bs = line({0.6 / kappa, 2.2 / kappa}, {0.5, 0.9});
  const double lhs = oracle::hk_grid_search(a, b, kappa).value;
  const double rhs = kappa * kappa * oracle::hk_grid_search(as, bs, 1.0).value;
  EXPECT_NEAR(lhs, rhs, 1e-6);
  EXPECT_NEAR(hk(a, b, kappa, eps).plan.value, kappa * kappa * hk(as, bs, 1.0, eps / (kappa * kappa)).plan.value,
              1e-5);
}

TEST(SoftMarginal, ZeroMassAtomsGetTransformedPotentials) {
  // 0.5 is in range of the target atom, 3.0 is beyond kappa pi / 2 from it.
  const DiscreteMeasure a = line({0, 0.5, 3.0}, {1.0, 0.0, 0.0}), b = line({0.2}, {1.0});
  const SolveResult r = hk(a, b, 1.0, 1e-4);
  EXPECT_EQ(r.plan.matrix(1, 0), 0.0);
  EXPECT_EQ(r.plan.matrix(2, 0), 0.0);
  EXPECT_LT(r.potentials.phi0(1), 1.0);
  EXPECT_GE((1 - r.potentials.phi0(1)) * (1 - r.potentials.phi1(0)), std::pow(std::cos(0.3), 2) - 1e-3);
  EXPECT_EQ(r.potentials.phi0(2), 1.0);
}

TEST(Optimality, ClosedFormDiracPasses) {
  const double m0 = 1.3, m1 = 0.6, d = 0.9, kappa = 1.0;
  const auto ref = test::dirac_reference(m0, m1, d, kappa);
  DualPotentials pot;
  pot.phi0 = Eigen::VectorXd::Constant(1, kappa * kappa * (1 - ref.plan_mass / m0));
  pot.phi1 = Eigen::VectorXd::Constant(1, kappa * kappa * (1 - ref.plan_mass / m1));
  const Eigen::MatrixXd plan = Eigen::MatrixXd::Constant(1, 1, ref.plan_mass);
  const auto rep = check_optimality_conditions(plan, pot, dirac1(0, m0), dirac1(d, m1), kappa, 1e-9);
  EXPECT_TRUE(rep.pass);
  pot.phi0(0) += 0.05;
  const auto bad = check_optimality_conditions(plan, pot, dirac1(0, m0), dirac1(d, m1), kappa, 1e-9);
  EXPECT_FALSE(bad.pass);
  EXPECT_GT(std::max({bad.product_violation, bad.density_violation}), 1e-3);
}

TEST(Optimality, FarApartZeroPlanPasses) {
  DualPotentials pot{Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(1), {}, {}};
  const auto rep = check_optimality_conditions(Eigen::MatrixXd::Zero(2, 1), pot, line({0, 0.1}, {1, 1}),
                                               dirac1(3.0), 1.0, 1e-9);
  EXPECT_TRUE(rep.pass);
}

TEST(Optimality, EntropicSolvePassesAtFiftyEpsilon) {
  const double eps = 1e-4;
  const DiscreteMeasure a = line({0, 0.4}, {0.7, 0.5}), b = line({0.2, 0.9}, {0.6, 0.8});
  const SolveResult r = hk(a, b, 1.0, eps);
  EXPECT_TRUE(check_optimality_conditions(r.plan.matrix, r.potentials, a, b, 1.0, 50 * eps).pass);
}

TEST(DefaultEpsilon, UsesSpacingWithinEachMeasure) {
  const DiscreteMeasure a = line({0, 0.1, 0.2}, {1, 1, 1}), b = line({0.001, 0.101, 0.201}, {1, 1, 1});
  EXPECT_NEAR(default_epsilon(a, b), 0.01, 1e-12);
  EXPECT_DOUBLE_EQ(default_epsilon(dirac1(0), dirac1(1)), 1e-4);
}

TEST(Config, Validation) {
  SolverConfig c;
  c.epsilon_scaling_factor = 1.0;
  EXPECT_THROW(c.validate(), InvalidInputError);
  c = SolverConfig{};
  c.kappa = -1.0;
  EXPECT_THROW(c.validate(), InvalidInputError);
}

}  // namespace
}  // namespace lot
