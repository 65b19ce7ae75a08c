#pragma once

#include <Eigen/Dense>
#include <string>

namespace lot {

using Point = Eigen::VectorXd;
using TangentVector = Eigen::VectorXd;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

/// Riemannian manifold embedded in an ambient Euclidean space.
///
/// Points and tangent vectors are stored in ambient coordinates. The sphere
/// is {x : |x| = r}; the hyperbolic space uses the hyperboloid model with the
/// last coordinate time-like, x_n = sqrt(1 + x_1^2 + ... + x_{n-1}^2).
class Manifold {
 public:
  enum class Kind { Euclidean, Sphere, Hyperbolic };

  /// Angular distance from the antipode below which `log` on the sphere fails.
  static constexpr double kCutLocusMargin = 1e-9;

  Manifold() = default;
  static Manifold euclidean(int dim);
  static Manifold sphere(double radius = 1.0, int ambient_dim = 3);
  static Manifold hyperbolic(int ambient_dim = 3);

  Kind kind() const { return kind_; }
  int ambient_dim() const { return dim_; }
  double radius() const { return radius_; }
  std::string name() const;

  /// Nearest point on the manifold (radial for the sphere, lift for the hyperboloid).
  Point project(ConstVecRef coords) const;
  /// Orthogonal projection of an ambient vector onto the tangent space at x.
  TangentVector project_tangent(ConstVecRef x, ConstVecRef v) const;
  bool contains(ConstVecRef x, double tol = 1e-8) const;

  double dist(ConstVecRef x, ConstVecRef y) const;
  TangentVector log(ConstVecRef x, ConstVecRef y) const;
  Point exp(ConstVecRef x, ConstVecRef v) const;
  /// Metric at x. Throws InvalidInputError if u or v is not tangent at x.
  double inner(ConstVecRef x, ConstVecRef u, ConstVecRef v) const;
  double norm(ConstVecRef x, ConstVecRef v) const;
  /// exp(x, t log(x, y)).
  Point geodesic(ConstVecRef x, ConstVecRef y, double t) const;

  bool operator==(const Manifold& other) const {
    return kind_ == other.kind_ && dim_ == other.dim_ && radius_ == other.radius_;
  }
  bool operator!=(const Manifold& other) const { return !(*this == other); }

 private:
  Manifold(Kind kind, int dim, double radius) : kind_(kind), dim_(dim), radius_(radius) {}
  void check_dim(ConstVecRef v, const char* what) const;
  double minkowski(ConstVecRef u, ConstVecRef v) const;
  double tangency_defect(ConstVecRef x, ConstVecRef v) const;

  Kind kind_ = Kind::Euclidean;
  int dim_ = 1;
  double radius_ = 1.0;
};

}  // namespace lot
