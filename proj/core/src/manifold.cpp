#include "lot/manifold.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lot/error.hpp"

namespace lot {

namespace {

// x / sin(x) and sinh(x) / x style ratios lose precision near zero.
double theta_over_sin(double t) {
  if (std::abs(t) < 1e-4) return 1.0 + t * t / 6.0 + 7.0 * t * t * t * t / 360.0;
  return t / std::sin(t);
}

double sin_over_theta(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}

double theta_over_sinh(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0 + 7.0 * t * t * t * t / 360.0;
  return t / std::sinh(t);
}

double sinh_over_theta(double t) {
  if (std::abs(t) < 1e-4) return 1.0 + t * t / 6.0 + t * t * t * t / 120.0;
  return std::sinh(t) / t;
}

// Angle between two unit vectors, accurate at both ends of [0, pi].
double unit_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

}  // namespace

Manifold Manifold::euclidean(int dim) {
  if (dim < 1) throw InvalidInputError("euclidean dimension must be positive");
  return Manifold(Kind::Euclidean, dim, 1.0);
}

Manifold Manifold::sphere(double radius, int ambient_dim) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInputError("sphere radius must be positive");
  if (ambient_dim < 2) throw InvalidInputError("sphere ambient dimension must be at least 2");
  return Manifold(Kind::Sphere, ambient_dim, radius);
}

Manifold Manifold::hyperbolic(int ambient_dim) {
  if (ambient_dim < 2) throw InvalidInputError("hyperboloid ambient dimension must be at least 2");
  return Manifold(Kind::Hyperbolic, ambient_dim, 1.0);
}

std::string Manifold::name() const {
  switch (kind_) {
    case Kind::Euclidean: return "euclidean";
    case Kind::Sphere: return "sphere";
    case Kind::Hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

void Manifold::check_dim(ConstVecRef v, const char* what) const {
  if (v.size() != dim_) {
    std::ostringstream os;
    os << what << " has dimension " << v.size() << ", manifold " << name() << " expects " << dim_;
    throw InvalidInputError(os.str());
  }
  if (!v.allFinite()) throw InvalidInputError(std::string(what) + " has non-finite coordinates");
}

double Manifold::minkowski(ConstVecRef u, ConstVecRef v) const {
  const int n = dim_ - 1;
  return u.head(n).dot(v.head(n)) - u(n) * v(n);
}

double Manifold::tangency_defect(ConstVecRef x, ConstVecRef v) const {
  switch (kind_) {
    case Kind::Euclidean: return 0.0;
    case Kind::Sphere: return std::abs(x.dot(v)) / (radius_ * std::max(1.0, v.norm()));
    case Kind::Hyperbolic: return std::abs(minkowski(x, v)) / (x.norm() * std::max(1.0, v.norm()));
  }
  return 0.0;
}

Point Manifold::project(ConstVecRef coords) const {
  check_dim(coords, "point");
  switch (kind_) {
    case Kind::Euclidean: return coords;
    case Kind::Sphere: {
      const double n = coords.norm();
      if (n == 0.0) throw InvalidInputError("cannot project the origin onto the sphere");
      return coords * (radius_ / n);
    }
    case Kind::Hyperbolic: {
      Point p = coords;
      p(dim_ - 1) = std::sqrt(1.0 + coords.head(dim_ - 1).squaredNorm());
      return p;
    }
  }
  return coords;
}

TangentVector Manifold::project_tangent(ConstVecRef x, ConstVecRef v) const {
  switch (kind_) {
    case Kind::Euclidean: return v;
    case Kind::Sphere: return v - x * (x.dot(v) / (radius_ * radius_));
    case Kind::Hyperbolic: return v + x * minkowski(x, v);
  }
  return v;
}

bool Manifold::contains(ConstVecRef x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case Kind::Euclidean: return true;
    case Kind::Sphere: return std::abs(x.norm() - radius_) <= tol * radius_;
    case Kind::Hyperbolic: return x(dim_ - 1) > 0.0 && std::abs(minkowski(x, x) + 1.0) <= tol * x.squaredNorm();
  }
  return false;
}

double Manifold::dist(ConstVecRef x, ConstVecRef y) const {
  check_dim(x, "point");
  check_dim(y, "point");
  switch (kind_) {
    case Kind::Euclidean: return (x - y).norm();
    case Kind::Sphere: return radius_ * unit_angle(x / radius_, y / radius_);
    case Kind::Hyperbolic: {
      const Eigen::VectorXd diff = x - y;
      // <x-y, x-y> = 4 sinh^2(d/2) on the hyperboloid.
      const double q = std::max(0.0, minkowski(diff, diff));
      return 2.0 * std::asinh(0.5 * std::sqrt(q));
    }
  }
  return 0.0;
}

TangentVector Manifold::log(ConstVecRef x, ConstVecRef y) const {
  check_dim(x, "point");
  check_dim(y, "point");
  switch (kind_) {
    case Kind::Euclidean: return y - x;
    case Kind::Sphere: {
      const Eigen::VectorXd a = x / radius_;
      const Eigen::VectorXd b = y / radius_;
      const double theta = unit_angle(a, b);
      if (theta >= std::numbers::pi - kCutLocusMargin) {
        throw CutLocusError("sphere log requested between (near-)antipodal points");
      }
      const Eigen::VectorXd w = b - a * a.dot(b);
      return project_tangent(x, radius_ * theta_over_sin(theta) * w);
    }
    case Kind::Hyperbolic: {
      const double d = dist(x, y);
      const Eigen::VectorXd u = y + x * minkowski(x, y);
      return project_tangent(x, theta_over_sinh(d) * u);
    }
  }
  return y - x;
}

Point Manifold::exp(ConstVecRef x, ConstVecRef v) const {
  check_dim(x, "point");
  check_dim(v, "tangent vector");
  switch (kind_) {
    case Kind::Euclidean: return x + v;
    case Kind::Sphere: {
      const Eigen::VectorXd w = project_tangent(x, v);
      const double phi = w.norm() / radius_;
      return project(std::cos(phi) * x + sin_over_theta(phi) * w);
    }
    case Kind::Hyperbolic: {
      const Eigen::VectorXd w = project_tangent(x, v);
      const double s = std::sqrt(std::max(0.0, minkowski(w, w)));
      return project(std::cosh(s) * x + sinh_over_theta(s) * w);
    }
  }
  return x + v;
}

double Manifold::inner(ConstVecRef x, ConstVecRef u, ConstVecRef v) const {
  check_dim(x, "base point");
  check_dim(u, "tangent vector");
  check_dim(v, "tangent vector");
  constexpr double kTangentTol = 1e-8;
  if (tangency_defect(x, u) > kTangentTol || tangency_defect(x, v) > kTangentTol) {
    throw InvalidInputError("inner: vectors are not tangent at the given base point");
  }
  if (kind_ == Kind::Hyperbolic) return minkowski(u, v);
  return u.dot(v);
}

double Manifold::norm(ConstVecRef x, ConstVecRef v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

Point Manifold::geodesic(ConstVecRef x, ConstVecRef y, double t) const {
  return exp(x, t * log(x, y));
}

}  // namespace lot
