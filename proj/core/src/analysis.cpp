#include "lot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "lot/error.hpp"
#include "lot/oracle.hpp"

namespace lot {

namespace {

DiscreteMeasure empty_on(const Manifold& m) {
  return DiscreteMeasure(m, Eigen::MatrixXd(0, m.ambient_dim()), Eigen::VectorXd(0));
}

void check_embedding(const DiscreteMeasure& reference, const Embedding& e) {
  if (e.velocity.rows() != reference.size() || e.velocity.cols() != reference.manifold().ambient_dim() ||
      e.growth.size() != reference.size()) {
    throw InvalidInputError("embedding does not match the reference measure");
  }
}

}  // namespace

Embedding to_embedding(const W2Tangent& t) {
  return {t.velocity, Eigen::VectorXd::Zero(t.reference.size()), empty_on(t.reference.manifold())};
}

Embedding to_embedding(const HkTangent& t) { return {t.velocity, t.growth, t.singular}; }

Embedding to_embedding(const ShkTangent& t) { return {t.velocity, t.growth, t.singular}; }

W2Tangent as_w2(const DiscreteMeasure& reference, const Embedding& e) {
  check_embedding(reference, e);
  return {reference, e.velocity};
}

HkTangent as_hk(const DiscreteMeasure& reference, const Embedding& e, double kappa) {
  check_embedding(reference, e);
  HkTangent t;
  t.reference = reference;
  t.velocity = e.velocity;
  t.growth = e.growth;
  t.singular = e.singular.empty() ? empty_on(reference.manifold()) : e.singular;
  t.kappa = kappa;
  return t;
}

ShkTangent as_shk(const DiscreteMeasure& reference, const Embedding& e, double kappa) {
  check_embedding(reference, e);
  ShkTangent t;
  t.reference = reference;
  t.velocity = e.velocity;
  t.growth = e.growth;
  t.singular = e.singular.empty() ? empty_on(reference.manifold()) : e.singular;
  t.kappa = kappa;
  t.s_prime = shk_speed(std::sqrt(std::max(0.0, norm_shk(t))), kappa);
  return t;
}

Embedding embed(const DiscreteMeasure& reference, const DiscreteMeasure& sample, const Metric& metric,
                const SolverConfig& cfg) {
  if (metric.kind == MetricKind::W2) {
    const SolveResult r = sinkhorn_balanced(build_cost_w2(reference, sample), reference, sample, cfg);
    return to_embedding(log_w2(reference, sample, r.plan.matrix));
  }
  SolverConfig c = cfg;
  c.kappa = metric.kappa;
  const SolveResult r = sinkhorn_hk(build_cost_hk(reference, sample, metric.kappa), reference, sample, c);
  const HkTangent t = log_hk(reference, sample, r.plan.matrix, metric.kappa);
  if (metric.kind == MetricKind::HK) return to_embedding(t);
  return to_embedding(hk_to_shk(rescale_for_shk(t)));
}

EmbeddingSet embed_samples(const DiscreteMeasure& reference, const std::vector<DiscreteMeasure>& samples,
                           const Metric& metric, const SolverConfig& cfg) {
  EmbeddingSet set{reference, metric, {}};
  set.items.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    try {
      set.items.push_back(embed(reference, samples[k], metric, cfg));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("sample " + std::to_string(k) + ": " + e.what(), e.residual());
    } catch (const UnsupportedError& e) {
      throw UnsupportedError("sample " + std::to_string(k) + ": " + e.what());
    } catch (const Error& e) {
      throw InvalidInputError("sample " + std::to_string(k) + ": " + e.what());
    }
  }
  return set;
}

double embedding_inner(const DiscreteMeasure& reference, const Metric& metric, const Embedding& a,
                       const Embedding& b) {
  check_embedding(reference, a);
  check_embedding(reference, b);
  const Manifold& m = reference.manifold();
  const double growth_weight = metric.kind == MetricKind::W2 ? 0.0 : 0.25 * metric.kappa * metric.kappa;
  double s = 0.0;
  for (Eigen::Index i = 0; i < reference.size(); ++i) {
    const double w = reference.mass(i);
    if (w == 0.0) continue;
    const Point x = reference.point(i);
    const TangentVector u = m.project_tangent(x, a.velocity.row(i).transpose());
    const TangentVector v = m.project_tangent(x, b.velocity.row(i).transpose());
    s += w * (m.inner(x, u, v) + growth_weight * a.growth(i) * b.growth(i));
  }
  return s;
}

Embedding axpy(const Embedding& a, double s, const Embedding& b) {
  return {a.velocity + s * b.velocity, a.growth + s * b.growth, a.singular};
}

DiscreteMeasure exp_embedding(const DiscreteMeasure& reference, const Embedding& e, const Metric& metric) {
  switch (metric.kind) {
    case MetricKind::W2: return exp_w2(reference, as_w2(reference, e));
    case MetricKind::HK: return exp_hk(reference, as_hk(reference, e, metric.kappa));
    case MetricKind::SHK: return exp_shk(reference, as_shk(reference, e, metric.kappa));
  }
  throw InvalidInputError("unknown metric");
}

PcaResult pca(const EmbeddingSet& set) {
  const auto n = static_cast<Eigen::Index>(set.items.size());
  if (n < 2) throw InvalidInputError("pca: need at least two embeddings");
  for (const Embedding& e : set.items) {
    check_embedding(set.reference, e);
    if (e.singular.total_mass() > 0.0) {
      throw UnsupportedError("pca: embeddings with a singular part are not in a linear space");
    }
  }
  const DiscreteMeasure& ref = set.reference;
  Embedding mean{Eigen::MatrixXd::Zero(ref.size(), ref.manifold().ambient_dim()), Eigen::VectorXd::Zero(ref.size()),
                 empty_on(ref.manifold())};
  for (const Embedding& e : set.items) mean = axpy(mean, 1.0 / n, e);
  std::vector<Embedding> centered;
  centered.reserve(n);
  for (const Embedding& e : set.items) centered.push_back(axpy(e, -1.0, mean));

  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      gram(a, b) = gram(b, a) = embedding_inner(ref, set.metric, centered[a], centered[b]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw InvalidInputError("pca: eigen decomposition failed");
  const Eigen::VectorXd ev = es.eigenvalues().reverse();
  const Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();

  PcaResult out;
  out.mean = mean;
  out.eigenvalues = (ev.array().max(0.0) / static_cast<double>(n)).matrix();
  const double total = out.eigenvalues.sum();
  out.explained_ratio = total > 0.0 ? Eigen::VectorXd(out.eigenvalues / total) : Eigen::VectorXd::Zero(n);
  const double top = out.eigenvalues(0);
  Eigen::Index rank = 0;
  while (rank < n && top > 0.0 && out.eigenvalues(rank) > 1e-12 * top) ++rank;
  out.projections.resize(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    const double s = std::sqrt(n * out.eigenvalues(j));
    Embedding mode{Eigen::MatrixXd::Zero(ref.size(), ref.manifold().ambient_dim()), Eigen::VectorXd::Zero(ref.size()),
                   empty_on(ref.manifold())};
    for (Eigen::Index a = 0; a < n; ++a) mode = axpy(mode, vecs(a, j) / s, centered[a]);
    out.modes.push_back(std::move(mode));
    out.projections.col(j) = s * vecs.col(j);
  }
  return out;
}

ShootResult shoot(const DiscreteMeasure& reference, const Embedding& mean, const Embedding& mode, double sigma,
                  int steps, const Metric& metric) {
  if (steps < 1 || sigma < 0.0 || !std::isfinite(sigma)) throw InvalidInputError("shoot: need steps >= 1 and sigma >= 0");
  std::vector<double> times;
  if (sigma == 0.0 || steps == 1) {
    times.push_back(0.0);
  } else {
    for (int k = 0; k < steps; ++k) times.push_back(-sigma + 2.0 * sigma * k / (steps - 1));
  }
  ShootResult out;
  for (double t : times) {
    try {
      out.measures.push_back(exp_embedding(reference, axpy(mean, t, mode), metric));
      out.times.push_back(t);
    } catch (const InvalidInputError&) {
      out.truncated = true;
    }
  }
  if (out.times.empty()) throw InvalidInputError("shoot: no feasible time in the requested range");
  out.t_min = out.times.front();
  out.t_max = out.times.back();
  return out;
}

const std::vector<double>& StudyReport::get_series(const std::string& key) const {
  for (const auto& [k, v] : series) if (k == key) return v;
  throw InvalidInputError("report has no series '" + key + "'");
}

bool StudyReport::flag(const std::string& key) const {
  for (const auto& [k, v] : flags) if (k == key) return v;
  throw InvalidInputError("report has no flag '" + key + "'");
}

double StudyReport::scalar(const std::string& key) const {
  for (const auto& [k, v] : scalars) if (k == key) return v;
  throw InvalidInputError("report has no scalar '" + key + "'");
}

PlanProvider sinkhorn_plans(const SolverConfig& cfg) {
  return [cfg](const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, MetricKind kind, double kappa) {
    if (kind == MetricKind::W2) return sinkhorn_balanced(build_cost_w2(mu0, mu1), mu0, mu1, cfg).plan.matrix;
    SolverConfig c = cfg;
    c.kappa = kappa;
    return sinkhorn_hk(build_cost_hk(mu0, mu1, kappa), mu0, mu1, c).plan.matrix;
  };
}

namespace {

bool nonincreasing(const std::vector<double>& v, double tol, std::size_t from = 0) {
  for (std::size_t k = from + 1; k < v.size(); ++k) if (v[k] > v[k - 1] + tol) return false;
  return true;
}

bool nondecreasing(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k) if (v[k] < v[k - 1] - tol) return false;
  return true;
}

double l2_norm_rows(const DiscreteMeasure& mu, const Eigen::MatrixXd& rows) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) s += mu.mass(i) * rows.row(i).squaredNorm();
  return std::sqrt(s);
}

}  // namespace

StudyReport kappa_study(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const std::vector<double>& kappas,
                        const PlanProvider& plans, double tol) {
  if (kappas.empty()) throw InvalidInputError("kappa study: empty kappa list");
  const Eigen::MatrixXd w2_plan = plans(mu0, mu1, MetricKind::W2, 0.0);
  const W2Tangent w2 = log_w2(mu0, mu1, w2_plan);
  const CostMatrix w2_cost = build_cost_w2(mu0, mu1);
  const double w2_sq = (w2_plan.array() * w2_cost.array()).sum();

  std::vector<double> ks, gap, alpha, hk_sq, w2s;
  for (double kappa : kappas) {
    const Eigen::MatrixXd plan = plans(mu0, mu1, MetricKind::HK, kappa);
    const HkTangent t = log_hk(mu0, mu1, plan, kappa);
    ks.push_back(kappa);
    gap.push_back(l2_norm_rows(mu0, t.velocity - w2.velocity));
    alpha.push_back(l2_norm_rows(mu0, t.growth));
    hk_sq.push_back(primal_value_hk(plan, mu0, mu1, kappa));
    w2s.push_back(w2_sq);
  }
  StudyReport r;
  r.name = "kappa_study";
  r.series = {{"kappa", ks}, {"v_gap", gap}, {"alpha_norm", alpha}, {"hk_sq", hk_sq}, {"w2_sq", w2s}};
  const bool sorted = std::is_sorted(ks.begin(), ks.end());
  bool below = true;
  for (double h : hk_sq) below = below && h <= w2_sq + tol;
  r.flags = {{"v_gap_decreasing", sorted && nonincreasing(gap, tol)},
             {"alpha_decreasing", sorted && nonincreasing(alpha, tol)},
             {"hk_sq_increasing", sorted && nondecreasing(hk_sq, tol)},
             {"hk_sq_below_w2_sq", below}};
  r.scalars = {{"w2_sq", w2_sq}, {"tolerance", tol}};
  if (!sorted) r.notes.push_back("kappa list is not increasing; monotonicity flags are false");
  return r;
}

namespace {

struct Logged {
  Eigen::MatrixXd velocity;
  Eigen::VectorXd growth;
  double singular_mass = 0.0;
};

Logged take_log(const SequenceInstance& inst, const Metric& metric, const PlanProvider& plans) {
  const Eigen::MatrixXd plan = inst.plan ? *inst.plan : plans(inst.mu0, inst.mu1, metric.kind, metric.kappa);
  if (metric.kind == MetricKind::W2) {
    const W2Tangent t = log_w2(inst.mu0, inst.mu1, plan);
    return {t.velocity, Eigen::VectorXd::Zero(inst.mu0.size()), 0.0};
  }
  const HkTangent t = log_hk(inst.mu0, inst.mu1, plan, metric.kappa);
  if (metric.kind == MetricKind::HK) return {t.velocity, t.growth, t.singular.total_mass()};
  const ShkTangent s = hk_to_shk(rescale_for_shk(t));
  return {s.velocity, s.growth, s.singular.total_mass()};
}

Eigen::VectorXd moments(const DiscreteMeasure& mu, const Logged& t) {
  const int n = mu.manifold().ambient_dim();
  const int funcs = 1 + n + n * (n + 1) / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(funcs * (n + 1));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const Point x = mu.point(i);
    Eigen::VectorXd phi(funcs);
    int k = 0;
    phi(k++) = 1.0;
    for (int a = 0; a < n; ++a) phi(k++) = x(a);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) phi(k++) = x(a) * x(b);
    for (int f = 0; f < funcs; ++f) {
      const double w = mu.mass(i) * phi(f);
      for (int d = 0; d < n; ++d) out(f * (n + 1) + d) += w * t.velocity(i, d);
      out(f * (n + 1) + n) += w * t.growth(i);
    }
  }
  return out;
}

}  // namespace

StudyReport sequence_study(const std::vector<SequenceInstance>& sequence, const SequenceInstance& limit,
                           const Metric& metric, const PlanProvider& plans) {
  if (sequence.empty()) throw InvalidInputError("sequence study: empty sequence");
  const Logged lim = take_log(limit, metric, plans);
  const Eigen::VectorXd lim_mom = moments(limit.mu0, lim);
  std::vector<double> index, dev, sing, momentum;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const Logged t = take_log(sequence[k], metric, plans);
    const Eigen::VectorXd mom = moments(sequence[k].mu0, t);
    index.push_back(static_cast<double>(k));
    dev.push_back((mom - lim_mom).cwiseAbs().maxCoeff());
    sing.push_back(t.singular_mass);
    momentum.push_back(mom(0));
  }
  StudyReport r;
  r.name = "sequence_study";
  r.series = {{"index", index}, {"deviation", dev}, {"singular_mass", sing}, {"momentum", momentum}};
  const double max_sing = *std::max_element(sing.begin(), sing.end());
  const double lim_target = limit.mu1.total_mass();
  r.flags = {{"monotone_after_first", nonincreasing(dev, 1e-12, 1)},
             {"singular_discontinuity",
              max_sing <= 1e-12 && lim.singular_mass > 0.0 && std::abs(lim.singular_mass - lim_target) <= 1e-9}};
  r.scalars = {{"final_deviation", dev.back()},
               {"limit_singular_mass", lim.singular_mass},
               {"limit_momentum", lim_mom(0)}};
  return r;
}

DiscreteMeasure regrid(const DiscreteMeasure& mu, int cells, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (mu.manifold().kind() != Manifold::Kind::Euclidean) throw UnsupportedError("regrid: Euclidean measures only");
  const int n = mu.manifold().ambient_dim();
  if (cells < 1 || lo.size() != n || hi.size() != n) throw InvalidInputError("regrid: bad grid");
  std::map<long long, std::pair<double, Eigen::VectorXd>> bins;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu.mass(i) == 0.0) continue;
    long long key = 0;
    for (int a = n - 1; a >= 0; --a) {
      const double width = hi(a) - lo(a);
      int c = width > 0.0 ? static_cast<int>(std::floor((mu.points()(i, a) - lo(a)) / width * cells)) : 0;
      c = std::clamp(c, 0, cells - 1);
      key = key * cells + c;
    }
    auto [it, fresh] = bins.try_emplace(key, 0.0, Eigen::VectorXd::Zero(n));
    it->second.first += mu.mass(i);
    it->second.second += mu.mass(i) * mu.point(i);
  }
  Eigen::MatrixXd pts(bins.size(), n);
  Eigen::VectorXd mass(bins.size());
  Eigen::Index k = 0;
  for (const auto& [key, bin] : bins) {
    mass(k) = bin.first;
    pts.row(k) = (bin.second / bin.first).transpose();
    ++k;
  }
  return DiscreteMeasure(mu.manifold(), pts, mass);
}

StudyReport refinement_study(const DiscreteMeasure& mu0_fine, const DiscreteMeasure& mu1_fine,
                             const std::vector<int>& resolutions, const Metric& metric, const SolverConfig& cfg) {
  if (resolutions.empty()) throw InvalidInputError("refinement study: empty resolution list");
  const DiscreteMeasure joint = concat(mu0_fine, mu1_fine);
  const Eigen::VectorXd lo = joint.points().colwise().minCoeff().transpose();
  const Eigen::VectorXd hi = joint.points().colwise().maxCoeff().transpose();
  const Eigen::VectorXd pad = ((hi - lo).array() * 1e-9 + 1e-12).matrix();
  std::vector<SequenceInstance> seq;
  for (int n : resolutions) {
    seq.push_back({"N=" + std::to_string(n), regrid(mu0_fine, n, lo - pad, hi + pad),
                   regrid(mu1_fine, n, lo - pad, hi + pad), std::nullopt});
  }
  const SequenceInstance limit{"reference", mu0_fine, mu1_fine, std::nullopt};
  StudyReport r = sequence_study(seq, limit, metric, sinkhorn_plans(cfg));
  r.name = "refinement_study";
  r.series[0] = {"resolution", std::vector<double>(resolutions.begin(), resolutions.end())};
  return r;
}

StudyReport convexity_probe(const Manifold& manifold, const Point& x0, const Point& x1, const Point& y0,
                            const Point& y1, const Metric& metric, const std::vector<double>& times, double tol) {
  Eigen::MatrixXd xs(2, manifold.ambient_dim());
  xs.row(0) = manifold.project(x0).transpose();
  xs.row(1) = manifold.project(x1).transpose();
  const DiscreteMeasure mu(manifold, xs, Eigen::Vector2d(0.5, 0.5));
  const Point p0 = mu.point(0), p1 = mu.point(1);
  const Point targets[2] = {manifold.project(y0), manifold.project(y1)};

  std::vector<double> ts, margins;
  if (metric.kind == MetricKind::W2) {
    const TangentVector v[2][2] = {{manifold.log(p0, targets[0]), manifold.log(p1, targets[0])},
                                   {manifold.log(p0, targets[1]), manifold.log(p1, targets[1])}};
    for (double t : times) {
      const Point a = manifold.exp(p0, (1.0 - t) * v[0][0] + t * v[1][0]);
      const Point b = manifold.exp(p1, (1.0 - t) * v[0][1] + t * v[1][1]);
      auto sq = [&](const Point& u, const Point& w) {
        const double d = manifold.dist(u, w);
        return d * d;
      };
      ts.push_back(t);
      margins.push_back(sq(p0, b) + sq(p1, a) - sq(p0, a) - sq(p1, b));
    }
  } else {
    const double kappa = metric.kappa;
    Embedding w[2];
    for (int s = 0; s < 2; ++s) {
      const oracle::StarHk star = oracle::hk_to_dirac_closed_form(mu, targets[s], 1.0, kappa);
      const DiscreteMeasure nu = DiscreteMeasure::dirac(manifold, targets[s]);
      const HkTangent t = log_hk(mu, nu, Eigen::MatrixXd(star.plan), kappa);
      if (t.singular.total_mass() > 0.0) throw UnsupportedError("convexity probe: target is out of transport range");
      w[s] = metric.kind == MetricKind::HK ? to_embedding(t) : to_embedding(hk_to_shk(t));
    }
    for (double t : times) {
      const Embedding e = axpy(axpy(w[0], -t, w[0]), t, w[1]);
      const DiscreteMeasure nu = exp_embedding(mu, e, metric);
      const double n0 = nu.mass(0), n1 = nu.mass(1);
      const Point z0 = nu.point(0), z1 = nu.point(1);
      // Best plan supported on each pairing: sqrt(m n) Cos(d / kappa) per pair.
      Eigen::Matrix2d keep = Eigen::Matrix2d::Zero(), swap = Eigen::Matrix2d::Zero();
      keep(0, 0) = std::sqrt(0.5 * n0) * truncated_cos(manifold.dist(p0, z0), kappa);
      keep(1, 1) = std::sqrt(0.5 * n1) * truncated_cos(manifold.dist(p1, z1), kappa);
      swap(0, 1) = std::sqrt(0.5 * n1) * truncated_cos(manifold.dist(p0, z1), kappa);
      swap(1, 0) = std::sqrt(0.5 * n0) * truncated_cos(manifold.dist(p1, z0), kappa);
      const DiscreteMeasure target = nu.with_masses(Eigen::Vector2d(n0, n1));
      ts.push_back(t);
      margins.push_back(primal_value_hk(swap, mu, target, kappa) - primal_value_hk(keep, mu, target, kappa));
    }
  }
  StudyReport r;
  r.name = "convexity_probe";
  r.series = {{"t", ts}, {"margin", margins}};
  double lo = 0.0, hi = 0.0;
  for (double m : margins) {
    lo = std::min(lo, m);
    hi = std::max(hi, std::abs(m));
  }
  r.flags = {{"equality", hi <= 1e-10}, {"satisfied", lo >= -tol}, {"violated", lo < -tol}};
  r.scalars = {{"min_margin", lo}, {"max_abs_margin", hi}, {"tolerance", tol}};
  r.notes.push_back(hi <= 1e-10 ? "equality" : (lo >= -tol ? "satisfied" : "violated"));
  return r;
}

SequenceInstance mass_swap_instance(int n, double gap, int points_per_block) {
  if (n < 0 || n == 1 || points_per_block < 1) throw InvalidInputError("mass swap: need n = 0 or n >= 2");
  const int m = points_per_block;
  Eigen::MatrixXd pts(2 * m, 1);
  for (int k = 0; k < m; ++k) {
    pts(k, 0) = (k + 0.5) / m;
    pts(m + k, 0) = gap + (k + 0.5) / m;
  }
  const double big = n == 0 ? 1.0 : 1.0 - 1.0 / n;
  const double small = n == 0 ? 0.0 : 1.0 / n;
  Eigen::VectorXd a(2 * m), b(2 * m);
  a << Eigen::VectorXd::Constant(m, big / m), Eigen::VectorXd::Constant(m, small / m);
  b << Eigen::VectorXd::Constant(m, small / m), Eigen::VectorXd::Constant(m, big / m);
  const Manifold line = Manifold::euclidean(1);
  return {n == 0 ? "limit" : "n=" + std::to_string(n), DiscreteMeasure(line, pts, a), DiscreteMeasure(line, pts, b),
          std::nullopt};
}

SequenceInstance shifted_block_instance(int n, int points_per_block) {
  if (n < 0 || n == 1 || points_per_block < 1) throw InvalidInputError("shifted block: need n = 0 or n >= 2");
  const int m = points_per_block;
  const double shift = 0.5 * std::numbers::pi - (n == 0 ? 0.0 : 1.0 / n);
  Eigen::MatrixXd pts(2 * m, 1);
  for (int k = 0; k < m; ++k) {
    pts(k, 0) = (k + 0.5) / m;
    pts(m + k, 0) = shift + (k + 0.5) / m;
  }
  const Eigen::VectorXd mass = Eigen::VectorXd::Constant(2 * m, 1.0 / m);
  const double moved = n == 0 ? 0.0 : 1.0 / n;
  Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int k = 0; k < 2 * m; ++k) plan(k, k) = (1.0 - moved) / m;
  for (int k = 0; k < m; ++k) plan(k, m + k) += moved / m;
  const Manifold line = Manifold::euclidean(1);
  const DiscreteMeasure mu(line, pts, mass);
  return {n == 0 ? "limit" : "n=" + std::to_string(n), mu, mu, plan};
}

SequenceInstance receding_dirac_instance(int n) {
  if (n < 0 || n == 1) throw InvalidInputError("receding dirac: need n = 0 or n >= 2");
  const double d = 0.5 * std::numbers::pi - (n == 0 ? 0.0 : 1.0 / n);
  const Manifold line = Manifold::euclidean(1);
  const DiscreteMeasure mu0 = DiscreteMeasure::dirac(line, Eigen::VectorXd::Zero(1));
  const DiscreteMeasure mu1 = DiscreteMeasure::dirac(line, Eigen::VectorXd::Constant(1, d));
  Eigen::MatrixXd plan(1, 1);
  plan(0, 0) = oracle::hk_dirac_closed_form(1.0, 1.0, d, 1.0).plan_mass;
  return {n == 0 ? "limit" : "n=" + std::to_string(n), mu0, mu1, plan};
}

}  // namespace lot
