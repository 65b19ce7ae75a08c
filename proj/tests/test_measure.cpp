#include <gtest/gtest.h>

#include <random>

#include "lot/error.hpp"
#include "lot/measure.hpp"
#include "support.hpp"

namespace lot {
namespace {

using test::line;

TEST(Measure, TotalMass) {
  EXPECT_DOUBLE_EQ(line({0, 1}, {0.5, 0.5}).total_mass(), 1.0);
  EXPECT_DOUBLE_EQ(total_mass(DiscreteMeasure()), 0.0);
  EXPECT_DOUBLE_EQ(line({0, 1, 2}, {1, 2, 3}).total_mass(), 6.0);
}

TEST(Measure, Normalize) {
  EXPECT_EQ(normalize(line({0, 1}, {2, 2})).masses(), Eigen::Vector2d(0.5, 0.5));
  const DiscreteMeasure p = line({0, 1}, {0.25, 0.75});
  EXPECT_EQ(normalize(p).masses(), p.masses());
  EXPECT_EQ(normalize(p).points(), p.points());
  EXPECT_DOUBLE_EQ(normalize(line({4}, {7})).mass(0), 1.0);
  EXPECT_THROW(normalize(line({0}, {0})), InvalidInputError);
}

TEST(Measure, RejectsNegativeMass) { EXPECT_THROW(line({0, 1}, {1, -1}), InvalidInputError); }

TEST(Measure, ConcatKeepsAtoms) {
  const DiscreteMeasure c = concat(line({0}, {1}), line({2, 3}, {1, 1}));
  EXPECT_EQ(c.size(), 3);
  EXPECT_DOUBLE_EQ(c.total_mass(), 3.0);
}

TEST(Generators, DiskLinePaperValues) {
  const auto s = gen_disk_line(5.0, 0.2, 10, 7);
  ASSERT_EQ(s.size(), 10u);
  for (const auto& mu : s) {
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
    const Eigen::Vector2d c = mu.points().colwise().mean().transpose();
    EXPECT_GE(c(0), 0.2 - 1e-12);
    EXPECT_LE(c(0), 4.8 + 1e-12);
    EXPECT_NEAR(c(1), 0.0, 1e-12);
    for (Eigen::Index i = 0; i < mu.size(); ++i) EXPECT_LE((mu.point(i) - c).norm(), 0.2 + 1e-12);
  }
  EXPECT_EQ(gen_disk_line(5.0, 0.2, 1, 7).size(), 1u);
  EXPECT_THROW(gen_disk_line(0.3, 0.2, 1, 7), InvalidInputError);
}

TEST(Generators, DiskLineIsDeterministic) {
  const auto a = gen_disk_line(5.0, 0.2, 4, 99), b = gen_disk_line(5.0, 0.2, 4, 99);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].points(), b[k].points());
}

TEST(Generators, DefaultSpacingIsSixthOfRadius) {
  // Grid points of spacing R/6 inside the closed disk: 113 lattice points of norm <= 6.
  EXPECT_EQ(disk_line_reference(5.0, 0.2).size(), 113);
}

TEST(Generators, DiskBox) {
  const auto s = gen_disk_box(5.0, 0.3, 0.7, 8, 3);
  for (const auto& mu : s) {
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
    const Eigen::Vector2d c = mu.points().colwise().mean().transpose();
    EXPECT_GE(c.minCoeff(), 0.7 - 1e-9);
    EXPECT_LE(c.maxCoeff(), 4.3 + 1e-9);
  }
  const auto fixed = gen_disk_box(5.0, 0.4, 0.4, 3, 3);
  for (const auto& mu : fixed) EXPECT_EQ(mu.size(), fixed[0].size());
  const auto again = gen_disk_box(5.0, 0.3, 0.7, 8, 3);
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(s[k].points(), again[k].points());
  EXPECT_THROW(gen_disk_box(5.0, 0.7, 0.3, 1, 3), InvalidInputError);
}

TEST(Generators, SphereCaps) {
  const SphereCapData d = gen_sphere_caps(1.0, 0.3, 5, 1, 60);
  // The lattice is not centrally symmetric, so centroids sit on the axis only approximately.
  const Eigen::Vector3d mean = d.reference.points().colwise().mean().transpose();
  EXPECT_NEAR(mean.normalized()(2), 1.0, 1e-4);
  EXPECT_GE(d.reference.points().col(2).minCoeff(), std::cos(0.3) - 1e-12);
  ASSERT_EQ(d.samples.size(), 5u);
  for (const auto& mu : d.samples) {
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
    EXPECT_LE(mu.points().col(2).cwiseAbs().maxCoeff(), std::sin(0.3) + 1e-12);
    const Eigen::Vector3d c = mu.points().colwise().mean().transpose();
    EXPECT_NEAR(c(2), 0.0, 1e-2);
  }
  EXPECT_TRUE(gen_sphere_caps(1.0, 0.3, 0, 1).samples.empty());
  EXPECT_THROW(gen_sphere_caps(1.0, 2.0, 1, 1), InvalidInputError);
}

GridSpec unit_grid(int n) {
  GridSpec g;
  g.lo = {0.0, 0.0};
  g.hi = {1.0, 1.0};
  g.resolution = {n, n};
  return g;
}

TEST(Raster, AtomAtCellCenter) {
  const GridSpec g = unit_grid(4);
  const DiscreteMeasure mu(Manifold::euclidean(2), test::vec({g.center(0, 1), g.center(1, 2)}).transpose(),
                           Eigen::VectorXd::Constant(1, 0.7));
  const RasterImage img = rasterize(mu, g, 0.0);
  EXPECT_EQ((img.values.array() != 0.0).count(), 1);
  EXPECT_DOUBLE_EQ(img.at(1, 2), 0.7);
}

TEST(Raster, TwoAtomsInOneCell) {
  const GridSpec g = unit_grid(4);
  Eigen::MatrixXd p(2, 2);
  p << g.center(0, 0), g.center(1, 3), g.center(0, 0), g.center(1, 3);
  const RasterImage img = rasterize(DiscreteMeasure(Manifold::euclidean(2), p, Eigen::Vector2d(0.5, 0.5)), g, 0.0);
  EXPECT_DOUBLE_EQ(img.at(0, 3), 1.0);
}

TEST(Raster, MassAndLinearity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto cloud = [&](int n) {
    Eigen::MatrixXd p(n, 2);
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) {
      p.row(i) << u(rng), u(rng);
      m(i) = u(rng);
    }
    return DiscreteMeasure(Manifold::euclidean(2), p, m);
  };
  const GridSpec g = unit_grid(16);
  const DiscreteMeasure a = cloud(50), b = cloud(30);
  const RasterImage ra = rasterize(a, g, 0.0), rb = rasterize(b, g, 0.0);
  EXPECT_NEAR(ra.values.sum(), a.total_mass(), 1e-12);
  const DiscreteMeasure combo = concat(a.with_masses(2.0 * a.masses()), b.with_masses(0.5 * b.masses()));
  EXPECT_LT((rasterize(combo, g, 0.0).values - (2.0 * ra.values + 0.5 * rb.values)).cwiseAbs().maxCoeff(), 1e-12);
  // Blur only loses mass through the boundary.
  const RasterImage blurred = rasterize(a, g, 0.02);
  EXPECT_LE(blurred.values.sum(), a.total_mass() + 1e-12);
  EXPECT_GT(blurred.values.sum(), 0.9 * a.total_mass());
}

TEST(Raster, ClampsOutsidePoints) {
  const DiscreteMeasure mu(Manifold::euclidean(2), test::vec({2.0, 0.5}).transpose(), Eigen::VectorXd::Ones(1));
  const RasterImage img = rasterize(mu, unit_grid(4), 0.0);
  EXPECT_EQ(img.clamped_points, 1);
  EXPECT_NEAR(img.values.sum(), 1.0, 1e-12);
}

TEST(Raster, SphereChartIsLongitudeLatitude) {
  const Eigen::VectorXd c = chart_coordinates(Manifold::sphere(2.0), test::vec({0, 2, 0}));
  EXPECT_NEAR(c(0), test::kPi / 2, 1e-12);
  EXPECT_NEAR(c(1), 0.0, 1e-12);
}

}  // namespace
}  // namespace lot
