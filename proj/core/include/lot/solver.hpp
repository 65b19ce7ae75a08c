#pragma once

#include <Eigen/Dense>

#include "lot/measure.hpp"

namespace lot {

/// Pairwise costs; +infinity marks pairs that cannot exchange mass.
using CostMatrix = Eigen::MatrixXd;

struct SolverConfig {
  double epsilon_target = 0.0;  ///< <= 0: squared median nearest-neighbour distance
  double epsilon_scaling_factor = 0.5;
  int max_iters = 100000;  ///< per annealing stage
  double marginal_tol = 1e-8;
  double kappa = 1.0;

  void validate() const;
};

/// Squared geodesic distance.
CostMatrix build_cost_w2(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);
/// -2 kappa^2 log cos(d / kappa) for d < kappa pi / 2, +inf beyond.
CostMatrix build_cost_hk(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double kappa);
double hk_cost(double d, double kappa);
/// cos(min(d / kappa, pi / 2)).
double truncated_cos(double d, double kappa);

struct TransportPlan {
  Eigen::MatrixXd matrix;
  /// Sum of cost times plan for W2, the unregularized HK objective for HK.
  double value = 0.0;

  Eigen::VectorXd first_marginal() const { return matrix.rowwise().sum(); }
  Eigen::VectorXd second_marginal() const { return matrix.colwise().sum().transpose(); }
  double mass() const { return matrix.sum(); }
};

/// Balanced: Kantorovich potentials. HK: cone-scale potentials
/// Phi = kappa^2 (1 - exp(-u / kappa^2)) together with the raw entropic
/// potentials u. Phi equals kappa^2 on atoms that cannot move mass.
struct DualPotentials {
  Eigen::VectorXd phi0;
  Eigen::VectorXd phi1;
  Eigen::VectorXd u0;
  Eigen::VectorXd u1;
};

struct SolveStats {
  int iterations = 0;  ///< total over all annealing stages
  int stages = 0;
  double residual = 0.0;  ///< final-stage stopping criterion
  double epsilon = 0.0;
};

struct SolveResult {
  TransportPlan plan;
  DualPotentials potentials;
  SolveStats stats;
};

/// Squared median nearest-neighbour distance, each atom measured against the
/// other atoms of its own measure; 1e-4 when no measure has two distinct points.
double default_epsilon(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);

/// Entropic balanced OT by log-domain Sinkhorn with epsilon annealing.
/// Stops on the L1 violation of the first marginal.
SolveResult sinkhorn_balanced(const CostMatrix& cost, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              const SolverConfig& cfg);

/// Entropic unbalanced OT with KL marginal penalties of weight kappa^2.
/// Stops on the sup-norm change of the potentials over one sweep.
SolveResult sinkhorn_hk(const CostMatrix& cost, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                        const SolverConfig& cfg);

/// KL(rho | mu) = sum rho log(rho / mu) - |rho| + |mu|; +inf if rho is not << mu.
double kl_divergence(const Eigen::VectorXd& rho, const Eigen::VectorXd& mu);

/// HK objective <c, plan> + kappa^2 KL(plan_0 | mu0) + kappa^2 KL(plan_1 | mu1).
double primal_value_hk(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                       double kappa);
double primal_value_hk(const Eigen::MatrixXd& plan, const CostMatrix& cost, const Eigen::VectorXd& m0,
                       const Eigen::VectorXd& m1, double kappa);

/// sum Phi0 mu0 + sum Phi1 mu1.
double dual_value(const DualPotentials& pot, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);

/// Largest violations of the HK primal-dual optimality conditions. All
/// entries are dimensionless (potentials divided by kappa^2).
struct OptimalityReport {
  double product_violation = 0.0;  ///< |(1-Phi0)(1-Phi1) - cos^2| on the plan support
  double admissibility_violation = 0.0;  ///< max((cos^2 - (1-Phi0)(1-Phi1))_+) over all pairs
  double singular_violation = 0.0;  ///< |1 - Phi| on atoms the plan does not charge
  double density_violation = 0.0;  ///< |d plan_i / d mu_i - (1 - Phi_i)|
  double tol = 0.0;
  bool pass = false;
};

/// `support_rel`: a pair belongs to the support when its plan entry is at
/// least that fraction of the largest entry in its row.
OptimalityReport check_optimality_conditions(const Eigen::MatrixXd& plan, const DualPotentials& pot,
                                             const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                             double kappa, double tol, double support_rel = 1e-3);

}  // namespace lot
