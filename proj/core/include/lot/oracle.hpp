#pragma once

#include <Eigen/Dense>

#include "lot/measure.hpp"

namespace lot::oracle {

/// Exact plan together with its objective value.
struct ExactPlan {
  Eigen::MatrixXd plan;
  double value = 0.0;
};

/// Exact balanced OT for tiny instances (at most 6 atoms per side). Equal
/// counts with uniform masses enumerate permutations; otherwise masses must
/// be multiples of 1/D for some D <= 64 and the transportation polytope
/// vertices are enumerated by repeatedly saturating a row or a column.
ExactPlan exact_balanced(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& cost);

/// HK between two Diracs at distance d.
struct DiracHk {
  double value = 0.0;       ///< squared HK distance
  double plan_mass = 0.0;   ///< sqrt(m0 m1) Cos(d / kappa)
  double phi0 = 0.0;        ///< cone-scale potentials
  double phi1 = 0.0;
};
DiracHk hk_dirac_closed_form(double m0, double m1, double distance, double kappa);

/// HK between an atomic measure and a single Dirac m * delta_y.
struct StarHk {
  Eigen::VectorXd plan;  ///< mass sent from each atom to y
  double value = 0.0;
  Eigen::VectorXd phi0;
  double phi1 = 0.0;
};
StarHk hk_to_dirac_closed_form(const DiscreteMeasure& mu0, const Point& y, double m, double kappa);

/// Certified HK optimum for instances with at most 2 x 2 atoms: coarse grid
/// over each plan entry, then coordinate descent with exact per-entry
/// minimization until the iterates stop moving.
ExactPlan hk_grid_search(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double kappa,
                         double grid_step = 1e-3);

/// Semi-couplings: gamma0 has first marginal mu0, gamma1 has second marginal
/// mu1; `diag0` / `diag1` hold mass placed on the diagonal (x, x), which does
/// not enter the transport term.
struct SemiCoupling {
  Eigen::MatrixXd gamma0;
  Eigen::MatrixXd gamma1;
  Eigen::VectorXd diag0;
  Eigen::VectorXd diag1;
};

/// Optimal semi-coupling induced by a plan: gamma_i = (mu_i / plan_i) plan,
/// plus the uncharged part of mu_i on the diagonal.
SemiCoupling semicoupling_from_plan(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0,
                                    const DiscreteMeasure& mu1);

/// kappa^2 (|gamma0| + |gamma1| - 2 sum Cos(d / kappa) sqrt(gamma0 gamma1)).
double semicoupling_value(const SemiCoupling& s, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                          double kappa);

/// HK objective evaluated independently of the solver module.
double hk_objective(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                    double kappa);

}  // namespace lot::oracle
