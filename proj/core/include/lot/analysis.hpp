#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lot/measure.hpp"
#include "lot/solver.hpp"
#include "lot/tangent.hpp"

namespace lot {

struct Metric {
  MetricKind kind = MetricKind::W2;
  double kappa = 1.0;
};

/// Flattened tangent of one sample at a shared reference. For W2 the growth
/// vector is zero and ignored by the inner product.
struct Embedding {
  Eigen::MatrixXd velocity;
  Eigen::VectorXd growth;
  DiscreteMeasure singular;
};

struct EmbeddingSet {
  DiscreteMeasure reference;
  Metric metric;
  std::vector<Embedding> items;
};

Embedding to_embedding(const W2Tangent& t);
Embedding to_embedding(const HkTangent& t);
Embedding to_embedding(const ShkTangent& t);
W2Tangent as_w2(const DiscreteMeasure& reference, const Embedding& e);
HkTangent as_hk(const DiscreteMeasure& reference, const Embedding& e, double kappa);
ShkTangent as_shk(const DiscreteMeasure& reference, const Embedding& e, double kappa);

/// Solves the transport problem from the reference and takes the logarithm
/// in the requested geometry (SHK goes through the unit-mass rescaling).
Embedding embed(const DiscreteMeasure& reference, const DiscreteMeasure& sample, const Metric& metric,
                const SolverConfig& cfg);
/// Errors are rethrown with the offending sample index.
EmbeddingSet embed_samples(const DiscreteMeasure& reference, const std::vector<DiscreteMeasure>& samples,
                           const Metric& metric, const SolverConfig& cfg);

/// Tangent inner product sum_x m(x) (<v, v'> + kappa^2 / 4 alpha alpha').
double embedding_inner(const DiscreteMeasure& reference, const Metric& metric, const Embedding& a,
                       const Embedding& b);
/// a + s b (singular parts are not combined).
Embedding axpy(const Embedding& a, double s, const Embedding& b);

/// Exponential of an embedding in the given geometry.
DiscreteMeasure exp_embedding(const DiscreteMeasure& reference, const Embedding& e, const Metric& metric);

struct PcaResult {
  Eigen::VectorXd eigenvalues;      ///< empirical covariance spectrum, descending
  Eigen::VectorXd explained_ratio;  ///< eigenvalues / their sum
  std::vector<Embedding> modes;     ///< orthonormal, one per nonzero eigenvalue
  Embedding mean;
  Eigen::MatrixXd projections;      ///< samples x modes
};

/// PCA through the N x N Gram matrix of the centered embeddings. Rejects
/// embeddings with a nonzero singular part.
PcaResult pca(const EmbeddingSet& set);

struct ShootResult {
  std::vector<double> times;
  std::vector<DiscreteMeasure> measures;
  bool truncated = false;  ///< some requested times gave infeasible tangents
  double t_min = 0.0;      ///< feasible range actually used
  double t_max = 0.0;
};

/// exp(mean + t mode) for `steps` equally spaced t in [-sigma, sigma].
ShootResult shoot(const DiscreteMeasure& reference, const Embedding& mean, const Embedding& mode, double sigma,
                  int steps, const Metric& metric);

/// Named series, flags and scalars produced by the studies.
struct StudyReport {
  std::string name;
  std::vector<std::pair<std::string, std::vector<double>>> series;
  std::vector<std::pair<std::string, bool>> flags;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::string> notes;

  const std::vector<double>& get_series(const std::string& key) const;
  bool flag(const std::string& key) const;
  double scalar(const std::string& key) const;
};

/// Returns a plan between two measures for the given geometry and kappa.
using PlanProvider =
    std::function<Eigen::MatrixXd(const DiscreteMeasure&, const DiscreteMeasure&, MetricKind, double kappa)>;
/// Entropic plans from the Sinkhorn solvers (W2 plans for W2, HK plans otherwise).
PlanProvider sinkhorn_plans(const SolverConfig& cfg);

/// HK logarithms against the W2 logarithm for a range of kappa.
/// Series: kappa, v_gap, alpha_norm, hk_sq, w2_sq. `tol` absorbs entropic
/// noise in the monotonicity flags.
StudyReport kappa_study(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const std::vector<double>& kappas,
                        const PlanProvider& plans, double tol = 0.0);

struct SequenceInstance {
  std::string label;
  DiscreteMeasure mu0;
  DiscreteMeasure mu1;
  std::optional<Eigen::MatrixXd> plan;  ///< prescribed plan; solved when empty
};

/// Moments of the logarithm along a sequence of instances compared with a
/// limit instance. Test functions are 1, x_k and x_k x_l on ambient
/// coordinates, integrated against v mu0 and alpha mu0.
/// Series: index, deviation, singular_mass, momentum. Flags:
/// monotone_after_first, singular_discontinuity.
StudyReport sequence_study(const std::vector<SequenceInstance>& sequence, const SequenceInstance& limit,
                           const Metric& metric, const PlanProvider& plans);

/// Coarsens a Euclidean measure onto `cells` bins per axis of the box
/// [lo, hi]; each bin keeps its mass at the mass-weighted centroid.
DiscreteMeasure regrid(const DiscreteMeasure& mu, int cells, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// sequence_study on regridded copies of the fine pair, with the fine pair as
/// the limit.
StudyReport refinement_study(const DiscreteMeasure& mu0_fine, const DiscreteMeasure& mu1_fine,
                             const std::vector<int>& resolutions, const Metric& metric, const SolverConfig& cfg);

/// Two-point exchange test for the linearized geometry: interpolates the
/// logarithms of two Dirac targets and compares the induced pairing with the
/// swapped one. Series: t, margin; margin >= 0 means the pairing is kept.
/// Flags: equality, satisfied, violated.
StudyReport convexity_probe(const Manifold& manifold, const Point& x0, const Point& x1, const Point& y0,
                            const Point& y1, const Metric& metric, const std::vector<double>& times,
                            double tol = 1e-9);

/// Mass swap between two unit blocks at distance `gap` (> pi / 2 + 1 for
/// kappa = 1): (1 - 1/n) on the first block and 1/n on the second, reversed
/// for the target. n = 0 gives the limit instance.
SequenceInstance mass_swap_instance(int n, double gap, int points_per_block);
/// Equal blocks [0, 1] and its shift by pi / 2 - 1/n, with the prescribed
/// plan (1 - 1/n) id + (1/n) shift. n = 0 gives the limit with the identity plan.
SequenceInstance shifted_block_instance(int n, int points_per_block);
/// delta_0 to delta at pi / 2 - 1/n (kappa = 1) with the exact plan.
SequenceInstance receding_dirac_instance(int n);

}  // namespace lot
