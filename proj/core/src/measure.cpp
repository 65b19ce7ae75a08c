#include "lot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lot/error.hpp"

namespace lot {

DiscreteMeasure::DiscreteMeasure(Manifold manifold, Eigen::MatrixXd points, Eigen::VectorXd masses)
    : manifold_(std::move(manifold)), points_(std::move(points)), masses_(std::move(masses)) {
  if (points_.rows() != masses_.size()) {
    throw InvalidInputError("measure: number of points and masses differ");
  }
  if (points_.rows() > 0 && points_.cols() != manifold_.ambient_dim()) {
    throw InvalidInputError("measure: point dimension does not match the manifold");
  }
  if (points_.rows() == 0) points_.resize(0, manifold_.ambient_dim());
  for (Eigen::Index i = 0; i < masses_.size(); ++i) {
    if (!std::isfinite(masses_(i)) || masses_(i) < 0.0) {
      throw InvalidInputError("measure: masses must be finite and nonnegative");
    }
    points_.row(i) = manifold_.project(points_.row(i).transpose()).transpose();
  }
}

DiscreteMeasure DiscreteMeasure::dirac(const Manifold& manifold, const Point& x, double mass) {
  Eigen::MatrixXd p(1, x.size());
  p.row(0) = x.transpose();
  return DiscreteMeasure(manifold, p, Eigen::VectorXd::Constant(1, mass));
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  const double m = total_mass();
  if (!(m > 0.0)) throw InvalidInputError("normalize: measure has zero total mass");
  return with_masses(masses_ / m);
}

DiscreteMeasure DiscreteMeasure::with_masses(Eigen::VectorXd masses) const {
  return DiscreteMeasure(manifold_, points_, std::move(masses));
}

double total_mass(const DiscreteMeasure& mu) { return mu.total_mass(); }

DiscreteMeasure normalize(const DiscreteMeasure& mu) { return mu.normalized(); }

DiscreteMeasure concat(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.manifold() != b.manifold()) throw InvalidInputError("concat: measures live on different manifolds");
  Eigen::MatrixXd p(a.size() + b.size(), a.manifold().ambient_dim());
  p << a.points(), b.points();
  Eigen::VectorXd m(a.size() + b.size());
  m << a.masses(), b.masses();
  return DiscreteMeasure(a.manifold(), p, m);
}

DiscreteMeasure make_disk(const Eigen::Vector2d& center, double radius, double spacing) {
  if (!(radius > 0.0) || !(spacing > 0.0)) throw InvalidInputError("disk: radius and spacing must be positive");
  const int n = static_cast<int>(std::floor(radius / spacing));
  std::vector<Eigen::Vector2d> pts;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const Eigen::Vector2d off(i * spacing, j * spacing);
      if (off.norm() <= radius + 1e-12 * radius) pts.push_back(center + off);
    }
  }
  Eigen::MatrixXd p(pts.size(), 2);
  for (std::size_t k = 0; k < pts.size(); ++k) p.row(k) = pts[k].transpose();
  const auto count = static_cast<Eigen::Index>(pts.size());
  return DiscreteMeasure(Manifold::euclidean(2), p, Eigen::VectorXd::Constant(count, 1.0 / count));
}

std::vector<DiscreteMeasure> gen_disk_line(double length, double radius, int count, std::uint64_t seed,
                                           double spacing) {
  if (count < 0) throw InvalidInputError("disk line: count must be nonnegative");
  if (!(length > 2.0 * radius)) throw InvalidInputError("disk line: segment shorter than the disk diameter");
  const double h = spacing > 0.0 ? spacing : radius / 6.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(radius, length - radius);
  std::vector<DiscreteMeasure> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(make_disk({pos(rng), 0.0}, radius, h));
  return out;
}

DiscreteMeasure disk_line_reference(double length, double radius, double spacing) {
  return make_disk({0.5 * length, 0.0}, radius, spacing > 0.0 ? spacing : radius / 6.0);
}

std::vector<DiscreteMeasure> gen_disk_box(double length, double r_min, double r_max, int count,
                                          std::uint64_t seed, double spacing) {
  if (count < 0) throw InvalidInputError("disk box: count must be nonnegative");
  if (!(r_min > 0.0) || r_max < r_min || !(length > 2.0 * r_max)) {
    throw InvalidInputError("disk box: need 0 < r_min <= r_max and L > 2 r_max");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(r_min, r_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<DiscreteMeasure> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double r = rad(rng);
    const double span = length - 2.0 * r_max;
    const Eigen::Vector2d c(r_max + unit(rng) * span, r_max + unit(rng) * span);
    out.push_back(make_disk(c, r, spacing > 0.0 ? spacing : r / 6.0));
  }
  return out;
}

DiscreteMeasure disk_box_reference(double length, double radius, double spacing) {
  return make_disk({0.5 * length, 0.5 * length}, radius, spacing > 0.0 ? spacing : radius / 6.0);
}

DiscreteMeasure make_sphere_cap(double radius, double cap_angle, const Eigen::Vector3d& center,
                                int points_per_cap) {
  if (!(cap_angle > 0.0) || cap_angle > std::numbers::pi || points_per_cap < 1) {
    throw InvalidInputError("sphere cap: need 0 < angle <= pi and at least one point");
  }
  if (center.norm() == 0.0) throw InvalidInputError("sphere cap: center must be nonzero");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double zmin = std::cos(cap_angle);
  const Eigen::Quaterniond rot =
      Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), center.normalized());
  Eigen::MatrixXd p(points_per_cap, 3);
  for (int i = 0; i < points_per_cap; ++i) {
    const double z = 1.0 - (1.0 - zmin) * (i + 0.5) / points_per_cap;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Eigen::Vector3d q(rho * std::cos(phi), rho * std::sin(phi), z);
    p.row(i) = (radius * (rot * q)).transpose();
  }
  return DiscreteMeasure(Manifold::sphere(radius, 3), p,
                         Eigen::VectorXd::Constant(points_per_cap, 1.0 / points_per_cap));
}

SphereCapData gen_sphere_caps(double radius, double cap_angle, int count, std::uint64_t seed,
                              int points_per_cap) {
  if (count < 0) throw InvalidInputError("sphere caps: count must be nonnegative");
  if (!(cap_angle > 0.0 && cap_angle < 0.5 * std::numbers::pi)) {
    throw InvalidInputError("sphere caps: cap angle must lie in (0, pi / 2)");
  }
  SphereCapData out;
  out.reference = make_sphere_cap(radius, cap_angle, Eigen::Vector3d::UnitZ(), points_per_cap);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lon(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < count; ++k) {
    const double a = lon(rng);
    out.samples.push_back(
        make_sphere_cap(radius, cap_angle, Eigen::Vector3d(std::cos(a), std::sin(a), 0.0), points_per_cap));
  }
  return out;
}

Eigen::Index GridSpec::cell_count() const {
  Eigen::Index n = 1;
  for (int r : resolution) n *= r;
  return n;
}

void GridSpec::validate() const {
  if (resolution.empty() || lo.size() != resolution.size() || hi.size() != resolution.size()) {
    throw InvalidInputError("grid: lo, hi and resolution must have the same nonzero length");
  }
  for (int a = 0; a < dims(); ++a) {
    if (resolution[a] < 1 || !(hi[a] > lo[a])) throw InvalidInputError("grid: empty axis");
  }
}

Eigen::VectorXd chart_coordinates(const Manifold& manifold, const Point& x) {
  switch (manifold.kind()) {
    case Manifold::Kind::Euclidean: return x;
    case Manifold::Kind::Sphere: {
      if (x.size() != 3) throw UnsupportedError("rasterize: sphere chart needs ambient dimension 3");
      Eigen::VectorXd c(2);
      c << std::atan2(x(1), x(0)), std::asin(std::clamp(x(2) / manifold.radius(), -1.0, 1.0));
      return c;
    }
    case Manifold::Kind::Hyperbolic: return x.head(x.size() - 1);
  }
  return x;
}

namespace {

void blur_axis(Eigen::VectorXd& values, const GridSpec& grid, int axis, double sigma) {
  const double s = sigma / grid.spacing(axis);
  const int radius = static_cast<int>(std::ceil(3.0 * s));
  if (radius < 1) return;
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k / s) * (k / s));
    total += kernel[k + radius];
  }
  for (double& w : kernel) w /= total;

  Eigen::Index stride = 1;
  for (int a = 0; a < axis; ++a) stride *= grid.resolution[a];
  const int n = grid.resolution[axis];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index idx = 0; idx < values.size(); ++idx) {
    const double v = values(idx);
    if (v == 0.0) continue;
    const int pos = static_cast<int>((idx / stride) % n);
    for (int k = -radius; k <= radius; ++k) {
      const int q = pos + k;
      if (q < 0 || q >= n) continue;
      out(idx + static_cast<Eigen::Index>(k) * stride) += v * kernel[k + radius];
    }
  }
  values = std::move(out);
}

}  // namespace

RasterImage rasterize(const DiscreteMeasure& mu, const GridSpec& grid, double blur_sigma) {
  grid.validate();
  if (blur_sigma < 0.0) throw InvalidInputError("rasterize: blur sigma must be nonnegative");
  RasterImage img;
  img.grid = grid;
  img.values = Eigen::VectorXd::Zero(grid.cell_count());
  const int d = grid.dims();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double m = mu.mass(i);
    if (m == 0.0) continue;
    const Eigen::VectorXd c = chart_coordinates(mu.manifold(), mu.point(i));
    if (c.size() != d) throw InvalidInputError("rasterize: grid dimension does not match the chart");
    bool clamped = false;
    for (int a = 0; a < d; ++a) {
      double x = c(a);
      if (x < grid.lo[a] || x > grid.hi[a]) {
        clamped = true;
        x = std::clamp(x, grid.lo[a], grid.hi[a]);
      }
      const double u = (x - grid.lo[a]) / grid.spacing(a) - 0.5;
      const double fl = std::floor(u);
      base[a] = static_cast<int>(fl);
      frac[a] = u - fl;
    }
    if (clamped) ++img.clamped_points;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = m;
      Eigen::Index idx = 0;
      Eigen::Index stride = 1;
      for (int a = 0; a < d; ++a) {
        const bool up = (corner >> a) & 1;
        w *= up ? frac[a] : 1.0 - frac[a];
        const int cell = std::clamp(base[a] + (up ? 1 : 0), 0, grid.resolution[a] - 1);
        idx += cell * stride;
        stride *= grid.resolution[a];
      }
      if (w != 0.0) img.values(idx) += w;
    }
  }
  if (blur_sigma > 0.0) {
    for (int a = 0; a < d; ++a) blur_axis(img.values, grid, a, blur_sigma);
  }
  return img;
}

}  // namespace lot
