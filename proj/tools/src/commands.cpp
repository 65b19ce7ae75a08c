#include "lot/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "lot/error.hpp"
#include "lot/io.hpp"
#include "lot/oracle.hpp"

namespace lot::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kProbabilityTol = 1e-9;

json num(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

json num_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

std::string indexed(const std::string& stem, std::size_t k, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu", k);
  return stem + buf + ext;
}

fs::path prepare_out(const RunConfig& cfg, bool required = true) {
  if (cfg.out.empty()) {
    if (required) throw InvalidInputError(cfg.command + ": --out is required");
    return {};
  }
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  io::write_text(dir / "config.resolved.json", cfg.to_json().dump(2) + "\n");
  return dir;
}

void need_inputs(const RunConfig& cfg, std::size_t n, const char* what) {
  if (cfg.inputs.size() != n) throw InvalidInputError(cfg.command + ": expected " + what);
}

void check_probability(const DiscreteMeasure& mu, const std::string& name) {
  if (std::abs(mu.total_mass() - 1.0) > kProbabilityTol) {
    throw InvalidInputError("shk needs probability measures; " + name + " has mass " + io::fmt(mu.total_mass()) +
                            " (pass --normalize)");
  }
}

DiscreteMeasure load(const RunConfig& cfg, const std::string& path, Metric metric) {
  DiscreteMeasure mu = io::read_measure(path);
  if (cfg.normalize) mu = normalize(mu);
  if (metric.kind == MetricKind::SHK) check_probability(mu, path);
  return mu;
}

SolverConfig solver_for(const RunConfig& cfg, const Metric& metric) {
  SolverConfig s = cfg.solver;
  s.kappa = metric.kappa;
  return s;
}

SolveResult solve(const RunConfig& cfg, const Metric& metric, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  const SolverConfig s = solver_for(cfg, metric);
  if (metric.kind == MetricKind::W2) return sinkhorn_balanced(build_cost_w2(mu0, mu1), mu0, mu1, s);
  return sinkhorn_hk(build_cost_hk(mu0, mu1, metric.kappa), mu0, mu1, s);
}

Eigen::MatrixXd plan_for(const RunConfig& cfg, const Metric& metric, const DiscreteMeasure& mu0,
                         const DiscreteMeasure& mu1) {
  const std::string path = cfg.param_str("plan", "");
  if (path.empty()) return solve(cfg, metric, mu0, mu1).plan.matrix;
  const Eigen::MatrixXd plan = io::read_matrix_csv(path);
  if (plan.rows() != mu0.size() || plan.cols() != mu1.size()) {
    throw InvalidInputError(path + ": plan shape does not match the measures");
  }
  return plan;
}

io::TangentRecord tangent_record(const Metric& metric, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                 const Eigen::MatrixXd& plan) {
  io::TangentRecord r{metric.kind, metric.kappa, mu0, {}};
  switch (metric.kind) {
    case MetricKind::W2: r.embedding = to_embedding(log_w2(mu0, mu1, plan)); break;
    case MetricKind::HK: r.embedding = to_embedding(log_hk(mu0, mu1, plan, metric.kappa)); break;
    case MetricKind::SHK:
      r.embedding = to_embedding(hk_to_shk(rescale_for_shk(log_hk(mu0, mu1, plan, metric.kappa))));
      break;
  }
  return r;
}

double tangent_norm_sq(const io::TangentRecord& t) {
  const Metric metric{t.metric, t.kappa};
  switch (t.metric) {
    case MetricKind::W2: return norm_w2(as_w2(t.reference, t.embedding));
    case MetricKind::HK: return norm_hk(as_hk(t.reference, t.embedding, t.kappa));
    case MetricKind::SHK: return norm_shk(as_shk(t.reference, t.embedding, t.kappa));
  }
  return embedding_inner(t.reference, metric, t.embedding, t.embedding);
}

struct Dataset {
  DiscreteMeasure reference;
  std::vector<DiscreteMeasure> samples;
};

Dataset load_dataset(const RunConfig& cfg, Metric metric) {
  need_inputs(cfg, 1, "one dataset directory");
  const fs::path dir(cfg.inputs[0]);
  const fs::path ref = dir / "reference.csv";
  if (!fs::exists(ref)) throw InvalidInputError(dir.string() + ": missing reference.csv");
  std::vector<fs::path> files;
  if (fs::is_directory(dir / "samples")) {
    for (const auto& e : fs::directory_iterator(dir / "samples")) {
      const std::string name = e.path().filename().string();
      if (e.path().extension() == ".csv" && name.find(".singular.") == std::string::npos) files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2) throw InvalidInputError(dir.string() + ": need at least two samples in samples/");
  Dataset d{load(cfg, ref.string(), metric), {}};
  for (const auto& f : files) d.samples.push_back(load(cfg, f.string(), metric));
  return d;
}

PcaResult run_pca(const RunConfig& cfg, const Metric& metric, const Dataset& d) {
  return pca(embed_samples(d.reference, d.samples, metric, solver_for(cfg, metric)));
}

GridSpec shoot_grid(const RunConfig& cfg, const Dataset& d) {
  const Manifold& m = d.reference.manifold();
  const int dims = static_cast<int>(chart_coordinates(m, d.reference.point(0)).size());
  if (dims > 2) throw UnsupportedError("shoot: rasters need a chart of dimension 1 or 2");
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dims, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  auto extend = [&](const DiscreteMeasure& mu) {
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      const Eigen::VectorXd c = chart_coordinates(m, mu.point(i));
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
  };
  extend(d.reference);
  for (const auto& s : d.samples) extend(s);
  const int res = cfg.param_int("resolution", 64);
  GridSpec g;
  for (int a = 0; a < dims; ++a) {
    const double pad = std::max(0.1 * (hi(a) - lo(a)), 1e-3);
    g.lo.push_back(lo(a) - pad);
    g.hi.push_back(hi(a) + pad);
    g.resolution.push_back(res);
  }
  g.validate();
  return g;
}

std::vector<int> int_list(const std::vector<double>& v, const char* what) {
  std::vector<int> out;
  for (double x : v) {
    if (x != std::floor(x) || x < 1) throw InvalidInputError(std::string(what) + " must be positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

json report_summary(const StudyReport& r) {
  json j;
  j["name"] = r.name;
  json flags = json::object();
  for (const auto& [k, v] : r.flags) flags[k] = v;
  j["flags"] = flags;
  json scalars = json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = num(v);
  j["scalars"] = scalars;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

void write_dataset(const fs::path& dir, const DiscreteMeasure& reference, const std::vector<DiscreteMeasure>& samples) {
  io::write_measure(reference, dir / "reference.csv");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    io::write_measure(samples[k], dir / "samples" / indexed("sample", k, ".csv"));
  }
}

}  // namespace

void cmd_dist(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  need_inputs(cfg, 2, "two measure files");
  const DiscreteMeasure mu0 = load(cfg, cfg.inputs[0], metric);
  const DiscreteMeasure mu1 = load(cfg, cfg.inputs[1], metric);
  const fs::path dir = prepare_out(cfg, false);
  const SolveResult r = solve(cfg, metric, mu0, mu1);

  json j;
  j["metric"] = metric_name(metric.kind);
  if (cfg.kappa) j["kappa"] = num(*cfg.kappa);
  double sq = r.plan.value;
  // Balanced potentials are stored in both slots, so one dual formula serves all metrics.
  const double gap = r.plan.value - dual_value(r.potentials, mu0, mu1);
  double d = std::sqrt(std::max(0.0, sq));
  if (metric.kind == MetricKind::SHK) {
    j["hk_sq"] = num(sq);
    d = shk_distance(std::max(0.0, sq), metric.kappa);
    sq = d * d;
  }
  j["distance_sq"] = num(sq);
  j["distance"] = num(d);
  j["duality_gap"] = num(gap);
  j["plan_mass"] = num(r.plan.mass());
  j["iterations"] = r.stats.iterations;
  j["epsilon"] = num(r.stats.epsilon);
  print(out, j);
  if (!dir.empty()) {
    io::write_text(dir / "dist.json", j.dump(2) + "\n");
    io::write_matrix_csv(r.plan.matrix, dir / "plan.csv");
    io::write_potentials(r.potentials, dir / "potentials_0.csv", dir / "potentials_1.csv");
  }
}

void cmd_log(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  need_inputs(cfg, 2, "two measure files");
  const DiscreteMeasure mu0 = load(cfg, cfg.inputs[0], metric);
  const DiscreteMeasure mu1 = load(cfg, cfg.inputs[1], metric);
  const fs::path dir = prepare_out(cfg);
  const io::TangentRecord t = tangent_record(metric, mu0, mu1, plan_for(cfg, metric, mu0, mu1));
  io::write_tangent(t, dir / "tangent.csv");
  json j;
  j["metric"] = metric_name(metric.kind);
  j["atoms"] = mu0.size();
  j["norm_sq"] = num(tangent_norm_sq(t));
  j["singular_mass"] = num(t.embedding.singular.total_mass());
  j["tangent"] = (dir / "tangent.csv").string();
  print(out, j);
}

void cmd_exp(const RunConfig& cfg, std::ostream& out) {
  need_inputs(cfg, 1, "one tangent file");
  const io::TangentRecord t = io::read_tangent(cfg.inputs[0]);
  const fs::path dir = prepare_out(cfg);
  const double s = cfg.param("scale", 1.0);
  const Metric metric{t.metric, t.kappa};
  Embedding e = t.embedding;
  if (s != 1.0) {
    e.velocity *= s;
    e.growth *= s;
    if (!e.singular.empty()) e.singular = e.singular.with_masses(e.singular.masses() * (s * s));
  }
  const DiscreteMeasure mu = exp_embedding(t.reference, e, metric);
  io::write_measure(mu, dir / "measure.csv");
  json j;
  j["metric"] = metric_name(metric.kind);
  j["scale"] = num(s);
  j["mass"] = num(mu.total_mass());
  j["measure"] = (dir / "measure.csv").string();
  print(out, j);
}

void cmd_geodesic(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  need_inputs(cfg, 2, "two measure files");
  const DiscreteMeasure mu0 = load(cfg, cfg.inputs[0], metric);
  const DiscreteMeasure mu1 = load(cfg, cfg.inputs[1], metric);
  const std::vector<double> times = cfg.param_list("times", {0.0, 0.25, 0.5, 0.75, 1.0});
  for (double t : times) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInputError("geodesic times must lie in [0, 1]");
  }
  const fs::path dir = prepare_out(cfg);
  const Eigen::MatrixXd plan = plan_for(cfg, metric, mu0, mu1);
  std::vector<double> masses;
  json files = json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double s = times[k];
    DiscreteMeasure mu;
    switch (metric.kind) {
      case MetricKind::W2: {
        W2Tangent v = log_w2(mu0, mu1, plan);
        v.velocity *= s;
        mu = exp_w2(mu0, v);
        break;
      }
      case MetricKind::HK: mu = geodesic_hk(mu0, log_hk(mu0, mu1, plan, metric.kappa), s); break;
      case MetricKind::SHK:
        mu = geodesic_shk(mu0, hk_to_shk(rescale_for_shk(log_hk(mu0, mu1, plan, metric.kappa))), s);
        break;
    }
    const std::string name = indexed("geodesic", k, ".csv");
    io::write_measure(mu, dir / name);
    masses.push_back(mu.total_mass());
    files.push_back(name);
  }
  Eigen::MatrixXd table(times.size(), 2);
  for (std::size_t k = 0; k < times.size(); ++k) table.row(k) << times[k], masses[k];
  io::write_matrix_csv(table, dir / "geodesic.csv", "t,mass");
  json j;
  j["metric"] = metric_name(metric.kind);
  j["times"] = num_list(times);
  j["masses"] = num_list(masses);
  j["files"] = files;
  print(out, j);
}

void cmd_pca(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  const Dataset d = load_dataset(cfg, metric);
  const fs::path dir = prepare_out(cfg);
  const PcaResult r = run_pca(cfg, metric, d);
  io::write_pca(r, d.reference, metric, dir);
  json j;
  j["metric"] = metric_name(metric.kind);
  j["samples"] = d.samples.size();
  const Eigen::Index shown = std::min<Eigen::Index>(r.eigenvalues.size(), 5);
  j["eigenvalues"] = num_list(std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + shown));
  j["explained_ratio"] = num_list(std::vector<double>(r.explained_ratio.data(), r.explained_ratio.data() + shown));
  j["lambda2_over_lambda1"] =
      num(r.eigenvalues.size() > 1 && r.eigenvalues(0) > 0.0 ? r.eigenvalues(1) / r.eigenvalues(0) : 0.0);
  print(out, j);
}

void cmd_shoot(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  const Dataset d = load_dataset(cfg, metric);
  const int mode = cfg.param_int("mode", 1);
  const double sigma = cfg.param("sigma", 1.0);
  const int steps = cfg.param_int("steps", 5);
  const fs::path dir = prepare_out(cfg);
  const GridSpec grid = shoot_grid(cfg, d);
  double blur = cfg.param("blur", -1.0);
  if (blur < 0.0) {
    blur = std::numeric_limits<double>::infinity();
    for (int a = 0; a < grid.dims(); ++a) blur = std::min(blur, grid.spacing(a));
  }
  const PcaResult r = run_pca(cfg, metric, d);
  if (mode < 1 || mode > static_cast<int>(r.modes.size())) {
    throw InvalidInputError("shoot: mode " + std::to_string(mode) + " out of range (1.." +
                            std::to_string(r.modes.size()) + ")");
  }
  // One unit of t is one standard deviation along the mode.
  const Embedding unit = axpy(axpy(r.mean, -1.0, r.mean), std::sqrt(r.eigenvalues(mode - 1)), r.modes[mode - 1]);
  const ShootResult s = shoot(d.reference, r.mean, unit, sigma, steps, metric);
  json files = json::array();
  int clamped = 0;
  for (std::size_t k = 0; k < s.measures.size(); ++k) {
    io::write_measure(s.measures[k], dir / indexed("shoot", k, ".csv"));
    const RasterImage img = rasterize(s.measures[k], grid, blur);
    clamped += img.clamped_points;
    io::write_pgm(img, dir / indexed("shoot", k, ".pgm"));
    io::write_raster_csv(img, dir / indexed("shoot", k, ".raster.csv"));
    files.push_back(indexed("shoot", k, ".pgm"));
  }
  json j;
  j["metric"] = metric_name(metric.kind);
  j["mode"] = mode;
  j["eigenvalue"] = num(r.eigenvalues(mode - 1));
  j["times"] = num_list(s.times);
  j["truncated"] = s.truncated;
  j["t_min"] = num(s.t_min);
  j["t_max"] = num(s.t_max);
  j["clamped_points"] = clamped;
  j["rasters"] = files;
  io::write_text(dir / "shoot.json", j.dump(2) + "\n");
  print(out, j);
}

void cmd_study_kappa(const RunConfig& cfg, std::ostream& out) {
  need_inputs(cfg, 2, "two measure files");
  if (cfg.kappa) throw InvalidInputError("study kappa takes a list through --kappas, not --kappa");
  const Metric metric{MetricKind::HK, 1.0};
  const DiscreteMeasure mu0 = load(cfg, cfg.inputs[0], metric);
  const DiscreteMeasure mu1 = load(cfg, cfg.inputs[1], metric);
  const std::vector<double> kappas = cfg.param_list("kappas", {1.0, 2.0, 5.0, 10.0, 20.0, 50.0});
  const double tol = cfg.param("tol", 1e-6);
  const fs::path dir = prepare_out(cfg);
  const StudyReport r = kappa_study(mu0, mu1, kappas, sinkhorn_plans(cfg.solver), tol);
  io::write_report(r, dir);
  print(out, report_summary(r));
}

void cmd_study_refine(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  need_inputs(cfg, 2, "two measure files");
  const DiscreteMeasure mu0 = load(cfg, cfg.inputs[0], metric);
  const DiscreteMeasure mu1 = load(cfg, cfg.inputs[1], metric);
  const std::vector<int> res = int_list(cfg.param_list("resolutions", {16, 32, 64, 128}), "resolutions");
  const fs::path dir = prepare_out(cfg);
  const StudyReport r = refinement_study(mu0, mu1, res, metric, solver_for(cfg, metric));
  io::write_report(r, dir);
  json j = report_summary(r);
  j["deviation"] = num_list(r.get_series("deviation"));
  print(out, j);
}

void cmd_study_convexity(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  const Manifold m = cfg.manifold.value_or(Manifold::sphere(1.0));
  const double a = cfg.param("spread", 0.4);
  const double b = cfg.param("offset", 0.6);
  const int samples = cfg.param_int("samples", 19);
  if (samples < 1) throw InvalidInputError("study convexity: samples must be positive");
  Point pts[4];
  if (cfg.params.contains("points")) {
    const auto raw = cfg.params["points"].get<std::vector<std::vector<double>>>();
    if (raw.size() != 4) throw InvalidInputError("study convexity: points needs x0, x1, y0, y1");
    for (int k = 0; k < 4; ++k) pts[k] = Eigen::Map<const Eigen::VectorXd>(raw[k].data(), raw[k].size());
  } else {
    switch (m.kind()) {
      case Manifold::Kind::Euclidean:
        if (m.ambient_dim() != 2) throw UnsupportedError("study convexity: the built-in family needs the plane");
        pts[0] = Eigen::Vector2d(a, 0.0);
        pts[1] = Eigen::Vector2d(-a, 0.0);
        pts[2] = Eigen::Vector2d(0.0, b);
        pts[3] = Eigen::Vector2d(0.0, -b);
        break;
      case Manifold::Kind::Sphere: {
        if (m.ambient_dim() != 3) throw UnsupportedError("study convexity: the built-in family needs the 2-sphere");
        const double r = m.radius();
        pts[0] = Eigen::Vector3d(r * std::sin(a), 0.0, r * std::cos(a));
        pts[1] = Eigen::Vector3d(-r * std::sin(a), 0.0, r * std::cos(a));
        pts[2] = Eigen::Vector3d(0.0, r * std::sin(b), r * std::cos(b));
        pts[3] = Eigen::Vector3d(0.0, -r * std::sin(b), r * std::cos(b));
        break;
      }
      case Manifold::Kind::Hyperbolic:
        if (m.ambient_dim() != 3) throw UnsupportedError("study convexity: the built-in family needs the plane");
        pts[0] = Eigen::Vector3d(std::sinh(a), 0.0, std::cosh(a));
        pts[1] = Eigen::Vector3d(-std::sinh(a), 0.0, std::cosh(a));
        pts[2] = Eigen::Vector3d(0.0, std::sinh(b), std::cosh(b));
        pts[3] = Eigen::Vector3d(0.0, -std::sinh(b), std::cosh(b));
        break;
    }
  }
  std::vector<double> times;
  for (int k = 1; k <= samples; ++k) times.push_back(static_cast<double>(k) / (samples + 1));
  const fs::path dir = prepare_out(cfg);
  const StudyReport r = convexity_probe(m, pts[0], pts[1], pts[2], pts[3], metric, times);
  io::write_report(r, dir);
  json j = report_summary(r);
  j["manifold"] = m.name();
  j["verdict"] = r.notes.empty() ? "" : r.notes.front();
  print(out, j);
}

void cmd_gen_data(const RunConfig& cfg, std::ostream& out) {
  const std::string kind = cfg.param_str("kind", "");
  const int count = cfg.param_int("count", kind == "dirac-line" ? 40 : 20);
  const fs::path dir = prepare_out(cfg);
  DiscreteMeasure reference;
  std::vector<DiscreteMeasure> samples;
  if (kind == "disk-line") {
    const double len = cfg.param("length", 5.0), rad = cfg.param("radius", 0.2);
    const double h = cfg.param("spacing", 0.0);
    samples = gen_disk_line(len, rad, count, cfg.seed, h);
    reference = disk_line_reference(len, rad, h);
  } else if (kind == "disk-box") {
    const double len = cfg.param("length", 5.0), h = cfg.param("spacing", 0.0);
    samples = gen_disk_box(len, cfg.param("rmin", 0.3), cfg.param("rmax", 0.7), count, cfg.seed, h);
    reference = disk_box_reference(len, 0.5, h);
  } else if (kind == "sphere-caps") {
    SphereCapData caps = gen_sphere_caps(cfg.param("radius", 1.0), cfg.param("cap_angle", 0.3), count, cfg.seed,
                                         cfg.param_int("points_per_cap", 120));
    reference = std::move(caps.reference);
    samples = std::move(caps.samples);
  } else if (kind == "dirac-line") {
    const double len = cfg.param("length", 5.0);
    if (count < 2 || !(len > 0.0)) throw InvalidInputError("dirac-line: need count >= 2 and length > 0");
    const Manifold line = Manifold::euclidean(1);
    reference = DiscreteMeasure::dirac(line, Eigen::VectorXd::Constant(1, 0.5 * len));
    for (int k = 0; k < count; ++k) {
      samples.push_back(DiscreteMeasure::dirac(line, Eigen::VectorXd::Constant(1, len * k / (count - 1))));
    }
  } else {
    throw InvalidInputError("gen-data: unknown dataset '" + kind + "' (disk-line, disk-box, sphere-caps, dirac-line)");
  }
  write_dataset(dir, reference, samples);
  json j;
  j["dataset"] = kind;
  j["samples"] = samples.size();
  j["reference_atoms"] = reference.size();
  j["seed"] = cfg.seed;
  print(out, j);
}

void cmd_oracle_dirac(const RunConfig& cfg, std::ostream& out) {
  const double kappa = cfg.kappa.value_or(1.0);
  const oracle::DiracHk r =
      oracle::hk_dirac_closed_form(cfg.param("m0", 1.0), cfg.param("m1", 1.0), cfg.param("distance", 0.0), kappa);
  json j;
  j["kappa"] = num(kappa);
  j["value"] = num(r.value);
  j["plan_mass"] = num(r.plan_mass);
  j["phi0"] = num(r.phi0);
  j["phi1"] = num(r.phi1);
  print(out, j);
}

void cmd_oracle_exact(const RunConfig& cfg, std::ostream& out) {
  const Metric metric = cfg.metric_spec();
  need_inputs(cfg, 2, "two measure files");
  const DiscreteMeasure mu0 = load(cfg, cfg.inputs[0], metric);
  const DiscreteMeasure mu1 = load(cfg, cfg.inputs[1], metric);
  const fs::path dir = prepare_out(cfg, false);
  oracle::ExactPlan p;
  if (metric.kind == MetricKind::W2) {
    p = oracle::exact_balanced(mu0, mu1, build_cost_w2(mu0, mu1));
  } else if (mu1.size() == 1) {
    const oracle::StarHk s = oracle::hk_to_dirac_closed_form(mu0, mu1.point(0), mu1.mass(0), metric.kappa);
    p = {Eigen::MatrixXd(s.plan), s.value};
  } else {
    p = oracle::hk_grid_search(mu0, mu1, metric.kappa);
  }
  json j;
  j["metric"] = metric_name(metric.kind);
  j["value"] = num(p.value);
  j["plan_mass"] = num(p.plan.sum());
  print(out, j);
  if (!dir.empty()) io::write_matrix_csv(p.plan, dir / "plan.csv");
}

}  // namespace lot::cli
