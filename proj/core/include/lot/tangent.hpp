#pragma once

#include <Eigen/Dense>
#include <string>

#include "lot/measure.hpp"

namespace lot {

enum class MetricKind { W2, HK, SHK };
const char* metric_name(MetricKind kind);
/// Accepts "w2", "hk", "shk" (case-insensitive).
MetricKind parse_metric(const std::string& name);

/// Velocity field on the atoms of a reference measure (rows = atoms, ambient
/// coordinates, tangent at each atom).
struct W2Tangent {
  DiscreteMeasure reference;
  Eigen::MatrixXd velocity;
};

/// HK tangent: velocity, growth rate alpha >= -2 per atom, and the singular
/// part of the target that is created from nothing.
struct HkTangent {
  DiscreteMeasure reference;
  Eigen::MatrixXd velocity;
  Eigen::VectorXd growth;
  DiscreteMeasure singular;
  double kappa = 1.0;
  double dropped_mass = 0.0;  ///< plan mass discarded next to the transport cutoff
};

/// Spherical HK tangent. `s_prime` is the speed of the reparametrization that
/// maps HK geodesics of probability measures to SHK geodesics.
struct ShkTangent {
  DiscreteMeasure reference;
  Eigen::MatrixXd velocity;
  Eigen::VectorXd growth;
  DiscreteMeasure singular;
  double kappa = 1.0;
  double s_prime = 1.0;
};

struct LogOptions {
  /// Entries next to the HK cutoff carrying at most this mass are dropped
  /// instead of raising.
  double charge_tol = 1e-8;
  /// Distances within this margin of kappa pi / 2 count as the cutoff.
  double cutoff_margin = 1e-9;
};

/// Barycentric W2 logarithm: v(x) = sum_y log_x(y) plan(y | x).
W2Tangent log_w2(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& plan,
                 const LogOptions& opt = {});
/// Pushforward of mu0 by x -> exp_x(v(x)).
DiscreteMeasure exp_w2(const DiscreteMeasure& mu0, const W2Tangent& t);
/// sum_x |v(x)|^2 mu0(x).
double norm_w2(const W2Tangent& t);

/// Barycentric HK logarithm built from a plan between mu0 and mu1.
HkTangent log_hk(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& plan, double kappa,
                 const LogOptions& opt = {});
/// Exponential map. Atoms with zero resulting mass are kept with mass zero;
/// the singular part is appended.
DiscreteMeasure exp_hk(const DiscreteMeasure& mu0, const HkTangent& t);
/// |v|^2 + kappa^2 / 4 |alpha|^2 in L2(mu0) plus kappa^2 |singular|.
double norm_hk(const HkTangent& t);
/// Point s in [0, 1] on the geodesic encoded by t: exp of (s v, s alpha, s^2 singular).
DiscreteMeasure geodesic_hk(const DiscreteMeasure& mu0, const HkTangent& t, double s);
/// max |alpha + 2 Phi0 / kappa^2| over atoms of positive mass.
double alpha_dual_check(const HkTangent& t, const Eigen::VectorXd& phi0);
/// Scales velocity, growth and singular part (the latter by s^2).
HkTangent scale(const HkTangent& t, double s);

/// kappa arccos(1 - hk_sq / (2 kappa^2)).
double shk_distance(double hk_sq, double kappa);
/// (theta) / sin(theta) with theta = shk / kappa, i.e. the initial speed of the
/// HK-to-SHK reparametrization.
double shk_speed(double shk, double kappa);

/// Needs |mu0| = 1 and |exp_hk(mu0, t)| = 1.
ShkTangent hk_to_shk(const HkTangent& t);
HkTangent shk_to_hk(const ShkTangent& t);
double norm_shk(const ShkTangent& t);
DiscreteMeasure exp_shk(const DiscreteMeasure& mu0, const ShkTangent& t);
/// SHK geodesic at time t in [0, 1], a probability measure.
DiscreteMeasure geodesic_shk(const DiscreteMeasure& mu0, const ShkTangent& t, double time);

/// Rescales an HK tangent so that its exponential has unit mass.
HkTangent rescale_for_shk(const HkTangent& t);

}  // namespace lot
