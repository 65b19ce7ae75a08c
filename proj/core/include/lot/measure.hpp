#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lot/manifold.hpp"

namespace lot {

/// Finite weighted point cloud on a manifold. Rows of `points()` are atoms.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// Projects every row onto the manifold. Masses must be finite and >= 0.
  DiscreteMeasure(Manifold manifold, Eigen::MatrixXd points, Eigen::VectorXd masses);

  static DiscreteMeasure dirac(const Manifold& manifold, const Point& x, double mass = 1.0);

  const Manifold& manifold() const { return manifold_; }
  Eigen::Index size() const { return masses_.size(); }
  bool empty() const { return masses_.size() == 0; }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& masses() const { return masses_; }
  Point point(Eigen::Index i) const { return points_.row(i).transpose(); }
  double mass(Eigen::Index i) const { return masses_(i); }

  double total_mass() const { return masses_.sum(); }
  /// Same atoms with masses rescaled to sum to one. Throws on zero total mass.
  DiscreteMeasure normalized() const;
  DiscreteMeasure with_masses(Eigen::VectorXd masses) const;

 private:
  Manifold manifold_ = Manifold::euclidean(1);
  Eigen::MatrixXd points_ = Eigen::MatrixXd(0, 1);
  Eigen::VectorXd masses_ = Eigen::VectorXd(0);
};

double total_mass(const DiscreteMeasure& mu);
DiscreteMeasure normalize(const DiscreteMeasure& mu);
/// Concatenation of two measures on the same manifold.
DiscreteMeasure concat(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Uniform probability measure on the intersection of a disk with the square
/// grid {center + spacing * (i, j)}.
DiscreteMeasure make_disk(const Eigen::Vector2d& center, double radius, double spacing);

/// Disks of radius R with centers (c, 0), c ~ U[R, L - R]. spacing <= 0 means R / 6.
std::vector<DiscreteMeasure> gen_disk_line(double length, double radius, int count, std::uint64_t seed,
                                           double spacing = 0.0);
/// Disk of radius R centered at the middle of the segment.
DiscreteMeasure disk_line_reference(double length, double radius, double spacing = 0.0);

/// Disks with radius ~ U[r_min, r_max] and center ~ U[r_max, L - r_max]^2.
std::vector<DiscreteMeasure> gen_disk_box(double length, double r_min, double r_max, int count,
                                          std::uint64_t seed, double spacing = 0.0);
/// Disk of radius 0.5 at the center of [0, L]^2.
DiscreteMeasure disk_box_reference(double length, double radius = 0.5, double spacing = 0.0);

/// Uniform cap of angular radius `cap_angle` on the sphere of radius r,
/// sampled by a Fibonacci lattice and centered at `center` (any nonzero vector).
DiscreteMeasure make_sphere_cap(double radius, double cap_angle, const Eigen::Vector3d& center,
                                int points_per_cap);

struct SphereCapData {
  DiscreteMeasure reference;  ///< cap at the north pole
  std::vector<DiscreteMeasure> samples;  ///< caps centered at random equator points
};
SphereCapData gen_sphere_caps(double radius, double cap_angle, int count, std::uint64_t seed,
                              int points_per_cap = 120);

/// Regular grid of cells over an axis-aligned box in chart coordinates.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> resolution;

  int dims() const { return static_cast<int>(resolution.size()); }
  Eigen::Index cell_count() const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / resolution[axis]; }
  double center(int axis, int index) const { return lo[axis] + (index + 0.5) * spacing(axis); }
  void validate() const;
};

/// Cell values in row-major order with axis 0 varying fastest.
struct RasterImage {
  GridSpec grid;
  Eigen::VectorXd values;
  int clamped_points = 0;  ///< atoms that fell outside the grid and were clamped

  double at(int i, int j = 0) const { return values(i + static_cast<Eigen::Index>(j) * grid.resolution[0]); }
};

/// Chart used for rasterization: identity (Euclidean), (longitude, latitude)
/// on the sphere, spatial coordinates on the hyperboloid.
Eigen::VectorXd chart_coordinates(const Manifold& manifold, const Point& x);

/// Multilinear splatting onto cell centers followed by a separable Gaussian
/// blur (sigma in chart units, truncated at 3 sigma). Mass is preserved up to
/// blur truncation at the boundary.
RasterImage rasterize(const DiscreteMeasure& mu, const GridSpec& grid, double blur_sigma);

}  // namespace lot
