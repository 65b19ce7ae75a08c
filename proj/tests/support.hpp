#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lot/measure.hpp"

namespace lot::test {

inline constexpr double kPi = std::numbers::pi;

inline DiscreteMeasure line(std::vector<double> x, std::vector<double> m) {
  Eigen::MatrixXd p(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) p(i, 0) = x[i];
  return {Manifold::euclidean(1), p, Eigen::Map<Eigen::VectorXd>(m.data(), m.size())};
}

inline DiscreteMeasure dirac1(double x, double m = 1.0) { return line({x}, {m}); }

inline Point vec(std::initializer_list<double> v) {
  Point p(v.size());
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

/// Test-side HK between two Diracs, written from the cone formula:
/// kappa^2 (m0 + m1 - 2 sqrt(m0 m1) cos(min(d / kappa, pi / 2))).
struct DiracReference {
  double value;
  double plan_mass;
};
inline DiracReference dirac_reference(double m0, double m1, double d, double kappa) {
  const double c = d / kappa >= kPi / 2 ? 0.0 : std::cos(d / kappa);
  const double pm = std::sqrt(m0 * m1) * c;
  return {kappa * kappa * (m0 + m1 - 2.0 * pm), pm};
}

/// Test-side HK energy of a plan on the line, written independently of the solver.
inline double hk_energy_line(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                             double kappa) {
  auto kl = [](double r, double m) {
    if (r <= 0.0) return m;
    return r * std::log(r / m) - r + m;
  };
  double e = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (plan(i, j) <= 0.0) continue;
      const double d = std::abs(mu0.point(i)(0) - mu1.point(j)(0));
      if (d >= kappa * kPi / 2) return std::numeric_limits<double>::infinity();
      e += -2.0 * kappa * kappa * std::log(std::cos(d / kappa)) * plan(i, j);
    }
  }
  for (Eigen::Index i = 0; i < plan.rows(); ++i) e += kappa * kappa * kl(plan.row(i).sum(), mu0.mass(i));
  for (Eigen::Index j = 0; j < plan.cols(); ++j) e += kappa * kappa * kl(plan.col(j).sum(), mu1.mass(j));
  return e;
}

inline Point random_point(const Manifold& m, std::mt19937_64& rng, double spread = 1.0) {
  std::normal_distribution<double> n(0.0, spread);
  Point x(m.ambient_dim());
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = n(rng);
  if (m.kind() == Manifold::Kind::Sphere && x.norm() < 1e-6) x(0) = 1.0;
  return m.project(x);
}

}  // namespace lot::test
