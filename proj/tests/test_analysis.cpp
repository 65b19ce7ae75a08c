#include <gtest/gtest.h>

#include <random>

#include "lot/analysis.hpp"
#include "lot/error.hpp"
#include "lot/oracle.hpp"
#include "support.hpp"

namespace lot {
namespace {

using test::dirac1;
using test::kPi;
using test::line;
using test::vec;

/// Exact plans for instances whose second measure is a single atom.
PlanProvider closed_form_plans() {
  return [](const DiscreteMeasure& a, const DiscreteMeasure& b, MetricKind kind, double kappa) -> Eigen::MatrixXd {
    if (kind == MetricKind::W2) return a.masses();
    return oracle::hk_to_dirac_closed_form(a, b.point(0), b.mass(0), kappa).plan;
  };
}

SolverConfig eps(double e) {
  SolverConfig c;
  c.epsilon_target = e;
  return c;
}

std::vector<DiscreteMeasure> dirac_line(int count, double length) {
  std::vector<DiscreteMeasure> out;
  for (int k = 0; k < count; ++k) out.push_back(dirac1(length * k / (count - 1)));
  return out;
}

TEST(Embed, ReferenceEmbedsToZero) {
  const DiscreteMeasure ref = line({0, 0.2, 0.4}, {0.3, 0.3, 0.4});
  for (Metric m : {Metric{MetricKind::W2, 1.0}, Metric{MetricKind::HK, 1.0}, Metric{MetricKind::SHK, 1.0}}) {
    const EmbeddingSet s = embed_samples(ref, {ref}, m, eps(1e-4));
    EXPECT_LT(s.items[0].velocity.cwiseAbs().maxCoeff(), 1e-3);
    if (m.kind != MetricKind::W2) {
      EXPECT_LT(s.items[0].growth.cwiseAbs().maxCoeff(), 1e-3);
    }
  }
}

TEST(Embed, DiracLineFollowsClosedForm) {
  const double kappa = 2.0;
  const DiscreteMeasure ref = dirac1(1.0);
  for (double x : {0.0, 0.5, 1.8, 3.5}) {
    const Embedding hk = embed(ref, dirac1(x), {MetricKind::HK, kappa}, eps(1e-6));
    EXPECT_NEAR(hk.velocity(0, 0), kappa * std::sin((x - 1.0) / kappa), 1e-3);
    EXPECT_NEAR(hk.growth(0), 2 * (std::cos((x - 1.0) / kappa) - 1), 1e-3);
    const Embedding shk = embed(ref, dirac1(x), {MetricKind::SHK, kappa}, eps(1e-6));
    EXPECT_NEAR(shk.velocity(0, 0), x - 1.0, 1e-3);
    EXPECT_NEAR(shk.growth(0), 0.0, 1e-9);
  }
}

TEST(Embed, ErrorsCarrySampleIndex) {
  try {
    embed_samples(dirac1(0), {dirac1(0), dirac1(1, 2.0)}, {MetricKind::W2, 1.0}, eps(1e-3));
    FAIL();
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("sample 1"), std::string::npos);
  }
}

TEST(Pca, AntipodalPair) {
  EmbeddingSet s{dirac1(0), {MetricKind::HK, 1.0}, {}};
  const DiscreteMeasure none = line({}, {});
  s.items.push_back({Eigen::MatrixXd::Constant(1, 1, 0.6), Eigen::VectorXd::Constant(1, 0.4), none});
  s.items.push_back({Eigen::MatrixXd::Constant(1, 1, -0.6), Eigen::VectorXd::Constant(1, -0.4), none});
  const PcaResult r = pca(s);
  EXPECT_NEAR(r.eigenvalues(0), 0.36 + 0.25 * 0.16, 1e-12);
  EXPECT_NEAR(r.eigenvalues(1), 0.0, 1e-12);
  EXPECT_NEAR(embedding_inner(s.reference, s.metric, r.modes[0], r.modes[0]), 1.0, 1e-12);
}

TEST(Pca, DiracLineSpectra) {
  const double kappa = 6.0;
  const DiscreteMeasure ref = dirac1(2.5);
  const auto samples = dirac_line(40, 5.0);
  const PcaResult hk = pca(embed_samples(ref, samples, {MetricKind::HK, kappa}, eps(1e-8)));
  EXPECT_GT(hk.eigenvalues(1), 1e-6 * hk.eigenvalues(0));
  EXPECT_LT(hk.eigenvalues(2), 1e-6 * hk.eigenvalues(0));
  const PcaResult shk = pca(embed_samples(ref, samples, {MetricKind::SHK, kappa}, eps(1e-8)));
  EXPECT_LT(shk.eigenvalues(1), 1e-6 * shk.eigenvalues(0));
}

TEST(Pca, ReconstructionAndVariance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.3);
  const DiscreteMeasure ref = line({0, 1, 2}, {0.2, 0.5, 0.3});
  EmbeddingSet s{ref, {MetricKind::HK, 1.5}, {}};
  for (int k = 0; k < 6; ++k) {
    Embedding e{Eigen::MatrixXd(3, 1), Eigen::VectorXd(3), line({}, {})};
    for (int i = 0; i < 3; ++i) {
      e.velocity(i, 0) = n(rng);
      e.growth(i) = n(rng);
    }
    s.items.push_back(e);
  }
  const PcaResult r = pca(s);
  double variance = 0.0;
  for (const auto& e : s.items) {
    const Embedding c = axpy(e, -1.0, r.mean);
    variance += embedding_inner(ref, s.metric, c, c) / s.items.size();
  }
  EXPECT_NEAR(r.eigenvalues.sum(), variance, 1e-8);
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    Embedding rec = r.mean;
    for (std::size_t j = 0; j < r.modes.size(); ++j) rec = axpy(rec, r.projections(i, j), r.modes[j]);
    EXPECT_LT((rec.velocity - s.items[i].velocity).norm() + (rec.growth - s.items[i].growth).norm(), 1e-6);
  }
  for (std::size_t a = 0; a < r.modes.size(); ++a)
    for (std::size_t b = 0; b < r.modes.size(); ++b)
      EXPECT_NEAR(embedding_inner(ref, s.metric, r.modes[a], r.modes[b]), a == b ? 1.0 : 0.0, 1e-8);
  for (Eigen::Index k = 1; k < r.eigenvalues.size(); ++k) EXPECT_LE(r.eigenvalues(k), r.eigenvalues(k - 1));
}

TEST(Pca, RejectsSingularParts) {
  EmbeddingSet s{dirac1(0), {MetricKind::HK, 1.0}, {}};
  s.items.push_back({Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), dirac1(5, 0.1)});
  s.items.push_back({Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), line({}, {})});
  EXPECT_THROW(pca(s), UnsupportedError);
}

TEST(Shoot, Examples) {
  const DiscreteMeasure ref = dirac1(0);
  const Metric w2{MetricKind::W2, 1.0};
  const Embedding mean{Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::VectorXd::Zero(1), line({}, {})};
  const Embedding zero{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), line({}, {})};
  const Embedding unit{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), line({}, {})};
  const ShootResult still = shoot(ref, mean, zero, 2.0, 5, w2);
  for (const auto& mu : still.measures) EXPECT_DOUBLE_EQ(mu.point(0)(0), 0.5);
  EXPECT_EQ(shoot(ref, mean, unit, 0.0, 5, w2).measures.size(), 1u);
  const ShootResult moving = shoot(ref, mean, unit, 2.0, 5, w2);
  for (std::size_t k = 0; k < moving.times.size(); ++k)
    EXPECT_NEAR(moving.measures[k].point(0)(0), 0.5 + moving.times[k], 1e-15);
}

TEST(Shoot, TruncatesInfeasibleGrowth) {
  const Embedding mean{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), line({}, {})};
  const Embedding mode{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1), line({}, {})};
  const ShootResult r = shoot(dirac1(0), mean, mode, 3.0, 7, {MetricKind::HK, 1.0});
  EXPECT_TRUE(r.truncated);
  EXPECT_DOUBLE_EQ(r.t_min, -2.0);
  EXPECT_DOUBLE_EQ(r.t_max, 3.0);
}

TEST(KappaStudy, DiracPairClosedForm) {
  const std::vector<double> kappas{2, 5, 10, 20, 50};
  const StudyReport r = kappa_study(dirac1(0), dirac1(1), kappas, closed_form_plans());
  const auto& gap = r.get_series("v_gap");
  const auto& alpha = r.get_series("alpha_norm");
  for (std::size_t k = 0; k < kappas.size(); ++k) {
    EXPECT_NEAR(gap[k], std::abs(kappas[k] * std::sin(1 / kappas[k]) - 1), 1e-12);
    EXPECT_NEAR(alpha[k], 2 * (1 - std::cos(1 / kappas[k])), 1e-12);
  }
  // kappa = 10: 1 - 10 sin(0.1) and 2 (1 - cos(0.1)).
  EXPECT_NEAR(gap[2], 1.6658335317e-3, 1e-12);
  EXPECT_NEAR(alpha[2], 9.9916694e-3, 1e-10);
  EXPECT_TRUE(r.flag("v_gap_decreasing"));
  EXPECT_TRUE(r.flag("alpha_decreasing"));
  EXPECT_TRUE(r.flag("hk_sq_increasing"));
  EXPECT_TRUE(r.flag("hk_sq_below_w2_sq"));
}

TEST(KappaStudy, DiskInstanceGapsShrink) {
  const DiscreteMeasure a = line({0, 0.1, 0.2}, {0.3, 0.4, 0.3});
  const StudyReport r = kappa_study(a, dirac1(0.8), {1, 2, 4, 8}, closed_form_plans());
  EXPECT_TRUE(r.flag("v_gap_decreasing"));
  EXPECT_TRUE(r.flag("hk_sq_increasing"));
}

TEST(Refinement, IdenticalMeasuresStayAtZero) {
  std::vector<double> x, m;
  for (int i = 0; i < 64; ++i) {
    x.push_back((i + 0.5) / 64);
    m.push_back(1.0 / 64);
  }
  const DiscreteMeasure a = line(x, m);
  const double e = 1e-4;
  const StudyReport r = refinement_study(a, a, {4, 8, 16}, {MetricKind::HK, 1.0}, eps(e));
  for (double d : r.get_series("deviation")) EXPECT_LT(d, 10 * e);
}

TEST(Sequence, MassSwapSingularJump) {
  std::vector<SequenceInstance> seq;
  for (int n : {2, 4, 8, 16}) seq.push_back(mass_swap_instance(n, 3.0, 4));
  const StudyReport r = sequence_study(seq, mass_swap_instance(0, 3.0, 4), {MetricKind::HK, 1.0},
                                       sinkhorn_plans(eps(1e-4)));
  EXPECT_TRUE(r.flag("singular_discontinuity"));
  for (double s : r.get_series("singular_mass")) EXPECT_EQ(s, 0.0);
}

TEST(Sequence, RecedingDiracKeepsItsGap) {
  for (int n : {2, 10, 100}) {
    const SequenceInstance inst = receding_dirac_instance(n);
    const HkTangent t = log_hk(inst.mu0, inst.mu1, *inst.plan, 1.0);
    const double d = kPi / 2 - 1.0 / n;
    EXPECT_NEAR(t.velocity(0, 0), std::sin(d), 1e-9);
    EXPECT_NEAR(t.growth(0), 2 * (std::cos(d) - 1), 1e-9);
  }
}

TEST(Sequence, SubOptimalPlansMissTheLimit) {
  std::vector<SequenceInstance> seq;
  for (int n : {4, 16, 64}) seq.push_back(shifted_block_instance(n, 8));
  const StudyReport r = sequence_study(seq, shifted_block_instance(0, 8), {MetricKind::HK, 1.0},
                                       sinkhorn_plans(eps(1e-4)));
  EXPECT_GT(r.scalar("final_deviation"), 1e-2);
}

TEST(Convexity, FlatSphereHyperbolic) {
  std::vector<double> ts;
  for (int k = 1; k <= 9; ++k) ts.push_back(k / 10.0);
  const Metric w2{MetricKind::W2, 1.0};
  const double a = 0.4, b = 0.6;
  const StudyReport flat = convexity_probe(Manifold::euclidean(2), vec({a, 0}), vec({-a, 0}), vec({0, b}),
                                           vec({0, -b}), w2, ts);
  EXPECT_TRUE(flat.flag("equality"));
  EXPECT_EQ(flat.notes.front(), "equality");
  const StudyReport sphere =
      convexity_probe(Manifold::sphere(), vec({std::sin(a), 0, std::cos(a)}), vec({-std::sin(a), 0, std::cos(a)}),
                      vec({0, std::sin(b), std::cos(b)}), vec({0, -std::sin(b), std::cos(b)}), w2, ts);
  EXPECT_TRUE(sphere.flag("satisfied"));
  const StudyReport hyp = convexity_probe(
      Manifold::hyperbolic(), vec({std::sinh(b), 0, std::cosh(b)}), vec({-std::sinh(b), 0, std::cosh(b)}),
      vec({0, std::sinh(b), std::cosh(b)}), vec({0, -std::sinh(b), std::cosh(b)}), w2, ts);
  EXPECT_TRUE(hyp.flag("violated"));
}

TEST(Convexity, HkFlipsWithRadius) {
  std::vector<double> ts;
  for (int k = 1; k <= 19; ++k) ts.push_back(k / 20.0);
  auto probe = [&](double r, MetricKind kind) {
    const double a = 0.4, b = 0.6;
    return convexity_probe(Manifold::sphere(r), r * vec({std::sin(a), 0, std::cos(a)}),
                           r * vec({-std::sin(a), 0, std::cos(a)}), r * vec({0, std::sin(b), std::cos(b)}),
                           r * vec({0, -std::sin(b), std::cos(b)}), {kind, 1.0}, ts);
  };
  EXPECT_TRUE(probe(1.0, MetricKind::HK).flag("satisfied"));
  EXPECT_TRUE(probe(1.5, MetricKind::HK).flag("violated"));
  EXPECT_TRUE(probe(1.5, MetricKind::SHK).flag("satisfied"));
}

}  // namespace
}  // namespace lot
