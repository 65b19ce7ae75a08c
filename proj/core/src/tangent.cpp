#include "lot/tangent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lot/error.hpp"

namespace lot {

namespace {

void check_plan(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& plan) {
  if (mu0.manifold() != mu1.manifold()) throw InvalidInputError("log: measures live on different manifolds");
  if (plan.rows() != mu0.size() || plan.cols() != mu1.size()) {
    throw InvalidPlanError("log: plan shape does not match the measures");
  }
  if (!plan.allFinite() || (plan.array() < 0.0).any()) {
    throw InvalidPlanError("log: plan entries must be finite and nonnegative");
  }
}

void check_reference(const DiscreteMeasure& mu0, const DiscreteMeasure& reference, Eigen::Index rows) {
  if (mu0.size() != reference.size() || mu0.manifold() != reference.manifold() || rows != mu0.size()) {
    throw InvalidInputError("tangent does not live at the given reference measure");
  }
}

// |v| at x for a (nearly) tangent ambient vector.
double tangent_norm(const Manifold& m, const Point& x, const TangentVector& v) {
  const TangentVector w = m.project_tangent(x, v);
  return m.norm(x, w);
}

// Plan weights this small are ignored; they cannot move the barycentre and
// would otherwise trip cut-locus checks on strictly positive entropic plans.
constexpr double kNegligibleWeight = 1e-14;

double theta_over_sin(double t) {
  if (std::abs(t) < 1e-4) return 1.0 + t * t / 6.0 + 7.0 * t * t * t * t / 360.0;
  return t / std::sin(t);
}

}  // namespace

const char* metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::W2: return "w2";
    case MetricKind::HK: return "hk";
    case MetricKind::SHK: return "shk";
  }
  return "unknown";
}

MetricKind parse_metric(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "w2") return MetricKind::W2;
  if (s == "hk") return MetricKind::HK;
  if (s == "shk") return MetricKind::SHK;
  throw InvalidInputError("unknown metric '" + name + "' (expected w2, hk or shk)");
}

W2Tangent log_w2(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& plan,
                 const LogOptions&) {
  check_plan(mu0, mu1, plan);
  const Eigen::VectorXd p0 = plan.rowwise().sum();
  const double scale = std::max(1e-300, mu0.total_mass());
  if ((p0 - mu0.masses()).lpNorm<1>() > 1e-6 * scale) {
    throw InvalidPlanError("log_w2: first marginal of the plan differs from the reference measure");
  }
  const Manifold& m = mu0.manifold();
  W2Tangent t{mu0, Eigen::MatrixXd::Zero(mu0.size(), m.ambient_dim())};
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    if (!(p0(i) > 0.0)) continue;
    const Point x = mu0.point(i);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m.ambient_dim());
    for (Eigen::Index j = 0; j < mu1.size(); ++j) {
      const double w = plan(i, j) / p0(i);
      if (w <= kNegligibleWeight) continue;
      v += w * m.log(x, mu1.point(j));
    }
    t.velocity.row(i) = m.project_tangent(x, v).transpose();
  }
  return t;
}

DiscreteMeasure exp_w2(const DiscreteMeasure& mu0, const W2Tangent& t) {
  check_reference(mu0, t.reference, t.velocity.rows());
  const Manifold& m = mu0.manifold();
  Eigen::MatrixXd pts(mu0.size(), m.ambient_dim());
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    pts.row(i) = m.exp(mu0.point(i), t.velocity.row(i).transpose()).transpose();
  }
  return DiscreteMeasure(m, pts, mu0.masses());
}

double norm_w2(const W2Tangent& t) {
  const Manifold& m = t.reference.manifold();
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.reference.size(); ++i) {
    const double n = tangent_norm(m, t.reference.point(i), t.velocity.row(i).transpose());
    s += t.reference.mass(i) * n * n;
  }
  return s;
}

HkTangent log_hk(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& plan, double kappa,
                 const LogOptions& opt) {
  check_plan(mu0, mu1, plan);
  if (!(kappa > 0.0)) throw InvalidInputError("log_hk: kappa must be positive");
  const Manifold& m = mu0.manifold();
  const double cutoff = kappa * (0.5 * std::numbers::pi - opt.cutoff_margin);

  // Distances, with entries at the transport cutoff removed from the plan.
  Eigen::MatrixXd p = plan;
  Eigen::MatrixXd d(mu0.size(), mu1.size());
  double dropped = 0.0;
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    for (Eigen::Index j = 0; j < mu1.size(); ++j) {
      d(i, j) = m.dist(mu0.point(i), mu1.point(j));
      if (p(i, j) > 0.0 && d(i, j) >= cutoff) {
        if (p(i, j) > opt.charge_tol) {
          std::ostringstream os;
          os << "log_hk: plan charges a pair at distance " << d(i, j) << " >= kappa pi / 2";
          throw InvalidPlanError(os.str());
        }
        dropped += p(i, j);
        p(i, j) = 0.0;
      }
    }
  }
  const Eigen::VectorXd p0 = p.rowwise().sum();
  const Eigen::VectorXd p1 = p.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    if (p0(i) > 0.0 && mu0.mass(i) == 0.0) throw InvalidPlanError("log_hk: plan moves mass from a zero-mass atom");
  }
  for (Eigen::Index j = 0; j < mu1.size(); ++j) {
    if (p1(j) > 0.0 && mu1.mass(j) == 0.0) throw InvalidPlanError("log_hk: plan moves mass to a zero-mass atom");
  }

  HkTangent t;
  t.reference = mu0;
  t.kappa = kappa;
  t.dropped_mass = dropped;
  t.velocity = Eigen::MatrixXd::Zero(mu0.size(), m.ambient_dim());
  t.growth = Eigen::VectorXd::Constant(mu0.size(), -2.0);
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    if (!(p0(i) > 0.0)) continue;
    const Point x = mu0.point(i);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m.ambient_dim());
    for (Eigen::Index j = 0; j < mu1.size(); ++j) {
      if (p(i, j) == 0.0 || d(i, j) == 0.0) continue;
      if (p(i, j) <= kNegligibleWeight * p0(i)) continue;
      v += (p(i, j) * std::tan(d(i, j) / kappa) / d(i, j)) * m.log(x, mu1.point(j));
    }
    t.velocity.row(i) = (m.project_tangent(x, v) * (kappa / mu0.mass(i))).transpose();
    t.growth(i) = 2.0 * (p0(i) / mu0.mass(i) - 1.0);
  }

  std::vector<Eigen::Index> sing;
  for (Eigen::Index j = 0; j < mu1.size(); ++j) if (p1(j) == 0.0 && mu1.mass(j) > 0.0) sing.push_back(j);
  Eigen::MatrixXd sp(sing.size(), m.ambient_dim());
  Eigen::VectorXd sm(sing.size());
  for (std::size_t k = 0; k < sing.size(); ++k) {
    sp.row(k) = mu1.points().row(sing[k]);
    sm(k) = mu1.mass(sing[k]);
  }
  t.singular = DiscreteMeasure(m, sp, sm);
  return t;
}

DiscreteMeasure exp_hk(const DiscreteMeasure& mu0, const HkTangent& t) {
  check_reference(mu0, t.reference, t.velocity.rows());
  if (t.growth.size() != mu0.size()) throw InvalidInputError("exp_hk: growth has the wrong size");
  if (t.singular.size() > 0 && t.singular.manifold() != mu0.manifold()) {
    throw InvalidInputError("exp_hk: singular part lives on another manifold");
  }
  const Manifold& m = mu0.manifold();
  const double kappa = t.kappa;
  Eigen::MatrixXd pts(mu0.size(), m.ambient_dim());
  Eigen::VectorXd mass(mu0.size());
  for (Eigen::Index i = 0; i < mu0.size(); ++i) {
    const Point x = mu0.point(i);
    const double a = 1.0 + 0.5 * t.growth(i);
    if (a < -1e-12) throw InvalidInputError("exp_hk: growth below -2 is infeasible");
    const TangentVector v = m.project_tangent(x, t.velocity.row(i).transpose());
    const double vn = m.norm(x, v);
    const double angle = std::atan2(vn / kappa, std::max(0.0, a));
    pts.row(i) = (vn > 0.0 ? m.exp(x, (kappa * angle / vn) * v) : x).transpose();
    mass(i) = mu0.mass(i) * (a * a + vn * vn / (kappa * kappa));
  }
  DiscreteMeasure moved(m, pts, mass);
  return t.singular.empty() ? moved : concat(moved, t.singular);
}

double norm_hk(const HkTangent& t) {
  const Manifold& m = t.reference.manifold();
  const double l = t.kappa * t.kappa;
  double s = 0.0;
  for (Eigen::Index i = 0; i < t.reference.size(); ++i) {
    const double n = tangent_norm(m, t.reference.point(i), t.velocity.row(i).transpose());
    s += t.reference.mass(i) * (n * n + 0.25 * l * t.growth(i) * t.growth(i));
  }
  return s + l * t.singular.total_mass();
}

HkTangent scale(const HkTangent& t, double s) {
  HkTangent out = t;
  out.velocity *= s;
  out.growth *= s;
  out.singular = t.singular.with_masses(t.singular.masses() * (s * s));
  return out;
}

DiscreteMeasure geodesic_hk(const DiscreteMeasure& mu0, const HkTangent& t, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidInputError("geodesic_hk: s must lie in [0, 1]");
  return exp_hk(mu0, scale(t, s));
}

double alpha_dual_check(const HkTangent& t, const Eigen::VectorXd& phi0) {
  if (phi0.size() != t.growth.size()) throw InvalidInputError("alpha_dual_check: size mismatch");
  double worst = 0.0;
  const double l = t.kappa * t.kappa;
  for (Eigen::Index i = 0; i < phi0.size(); ++i) {
    if (t.reference.mass(i) > 0.0) worst = std::max(worst, std::abs(t.growth(i) + 2.0 * phi0(i) / l));
  }
  return worst;
}

double shk_distance(double hk_sq, double kappa) {
  if (!(kappa > 0.0)) throw InvalidInputError("shk_distance: kappa must be positive");
  const double l = kappa * kappa;
  if (hk_sq > 2.0 * l * (1.0 + 1e-9)) throw InvalidInputError("shk_distance: HK^2 exceeds 2 kappa^2");
  const double h = std::clamp(hk_sq, 0.0, 2.0 * l);
  // kappa arccos(1 - h / (2 kappa^2)), written to stay accurate for small h.
  return 2.0 * kappa * std::asin(std::min(1.0, std::sqrt(h) / (2.0 * kappa)));
}

double shk_speed(double shk, double kappa) { return theta_over_sin(shk / kappa); }

ShkTangent hk_to_shk(const HkTangent& t) {
  constexpr double kMassTol = 1e-6;
  if (std::abs(t.reference.total_mass() - 1.0) > kMassTol) {
    throw InvalidInputError("hk_to_shk: reference measure is not a probability measure");
  }
  if (std::abs(exp_hk(t.reference, t).total_mass() - 1.0) > kMassTol) {
    throw InvalidInputError("hk_to_shk: exponential of the tangent does not have unit mass");
  }
  const double l = t.kappa * t.kappa;
  const double hk_sq = norm_hk(t);
  const double sp = shk_speed(shk_distance(hk_sq, t.kappa), t.kappa);
  ShkTangent out;
  out.reference = t.reference;
  out.kappa = t.kappa;
  out.s_prime = sp;
  out.velocity = sp * t.velocity;
  out.growth = sp * (t.growth.array() + hk_sq / l).matrix();
  out.singular = t.singular.with_masses(t.singular.masses() * (sp * sp));
  return out;
}

double norm_shk(const ShkTangent& t) {
  HkTangent h;
  h.reference = t.reference;
  h.velocity = t.velocity;
  h.growth = t.growth;
  h.singular = t.singular;
  h.kappa = t.kappa;
  return norm_hk(h);
}

HkTangent shk_to_hk(const ShkTangent& t) {
  const double kappa = t.kappa;
  const double shk = std::sqrt(std::max(0.0, norm_shk(t)));
  if (shk > 0.5 * std::numbers::pi * kappa * (1.0 + 1e-12)) {
    throw InvalidInputError("shk_to_hk: tangent norm exceeds kappa pi / 2");
  }
  const double theta = std::min(shk / kappa, 0.5 * std::numbers::pi);
  const double sp = theta_over_sin(theta);
  const double s = std::sin(0.5 * theta);
  const double hk_over_l = 4.0 * s * s;
  HkTangent out;
  out.reference = t.reference;
  out.kappa = kappa;
  out.velocity = t.velocity / sp;
  out.growth = (t.growth.array() / sp - hk_over_l).matrix();
  out.singular = t.singular.with_masses(t.singular.masses() / (sp * sp));
  return out;
}

DiscreteMeasure exp_shk(const DiscreteMeasure& mu0, const ShkTangent& t) { return exp_hk(mu0, shk_to_hk(t)); }

DiscreteMeasure geodesic_shk(const DiscreteMeasure& mu0, const ShkTangent& t, double time) {
  if (!(time >= 0.0 && time <= 1.0)) throw InvalidInputError("geodesic_shk: time must lie in [0, 1]");
  const HkTangent h = shk_to_hk(t);
  const double theta = std::sqrt(std::max(0.0, norm_shk(t))) / t.kappa;
  double s = time;
  if (theta > 1e-12) {
    const double a = std::sin(time * theta), b = std::sin((1.0 - time) * theta);
    s = a / (a + b);
  }
  const DiscreteMeasure mu = geodesic_hk(mu0, h, s);
  return mu.normalized();
}

HkTangent rescale_for_shk(const HkTangent& t) {
  const double mass = exp_hk(t.reference, t).total_mass();
  if (!(mass > 0.0)) throw InvalidInputError("rescale_for_shk: exponential has zero mass");
  const double q = 1.0 / std::sqrt(mass);
  HkTangent out = t;
  out.velocity = q * t.velocity;
  out.growth = (q * t.growth.array() + 2.0 * (q - 1.0)).matrix();
  out.singular = t.singular.with_masses(t.singular.masses() * (q * q));
  return out;
}

}  // namespace lot
