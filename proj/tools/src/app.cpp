#include "lot/cli/app.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <functional>
#include <memory>

#include "lot/cli/commands.hpp"
#include "lot/error.hpp"
#include "lot/io.hpp"

namespace lot::cli {

namespace {

using Handler = void (*)(const RunConfig&, std::ostream&);

/// Options whose values land in RunConfig::params when given on the command line.
class ParamOptions {
 public:
  void number(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    bind<double>(sub, flag, key, help);
  }
  void integer(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    bind<long long>(sub, flag, key, help);
  }
  void text(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    bind<std::string>(sub, flag, key, help);
  }
  void list(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<std::vector<double>>();
    CLI::Option* opt = sub->add_option(flag, *value, help)->delimiter(',');
    apply_.push_back([=](json& p) {
      if (opt->count()) p[key] = *value;
    });
  }
  void merge(json& params) const {
    for (const auto& f : apply_) f(params);
  }

 private:
  template <typename T>
  void bind(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = sub->add_option(flag, *value, help);
    apply_.push_back([=](json& p) {
      if (opt->count()) p[key] = *value;
    });
  }

  std::vector<std::function<void(json&)>> apply_;
};

Manifold make_manifold(const std::string& kind, int dim, double radius) {
  if (kind == "euclidean") return Manifold::euclidean(dim > 0 ? dim : 2);
  if (kind == "sphere") return Manifold::sphere(radius, dim > 0 ? dim : 3);
  if (kind == "hyperbolic") return Manifold::hyperbolic(dim > 0 ? dim : 3);
  throw InvalidInputError("unknown manifold '" + kind + "' (euclidean, sphere, hyperbolic)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linearized optimal transport for W2, HK and SHK", "lot"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, metric, out_dir, manifold_kind;
  double kappa = 0.0, epsilon = 0.0, eps_scaling = 0.0, marginal_tol = 0.0, radius = 1.0;
  int max_iters = 0, dim = 0;
  std::uint64_t seed = 0;
  bool normalize_flag = false;
  std::vector<std::string> positionals;

  CLI::Option* o_config = app.add_option("--config", config_path, "JSON run configuration");
  CLI::Option* o_metric = app.add_option("--metric", metric, "w2, hk or shk");
  CLI::Option* o_kappa = app.add_option("--kappa", kappa, "HK length scale");
  CLI::Option* o_eps = app.add_option("--epsilon", epsilon, "target entropic regularization");
  CLI::Option* o_scaling = app.add_option("--eps-scaling", eps_scaling, "epsilon annealing factor in (0, 1)");
  CLI::Option* o_iters = app.add_option("--max-iters", max_iters, "Sinkhorn iterations per annealing stage");
  CLI::Option* o_tol = app.add_option("--marginal-tol", marginal_tol, "Sinkhorn stopping tolerance");
  CLI::Option* o_out = app.add_option("--out", out_dir, "output directory");
  CLI::Option* o_seed = app.add_option("--seed", seed, "random seed");
  CLI::Option* o_norm = app.add_flag("--normalize", normalize_flag, "rescale inputs to unit mass");
  CLI::Option* o_manifold = app.add_option("--manifold", manifold_kind, "euclidean, sphere or hyperbolic");
  CLI::Option* o_radius = app.add_option("--radius", radius, "sphere radius, or disk radius for gen-data");
  CLI::Option* o_dim = app.add_option("--dim", dim, "ambient dimension of the manifold");

  ParamOptions params;
  std::vector<std::pair<CLI::App*, Handler>> handlers;
  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help, Handler h,
                     const std::string& inputs_help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    if (!inputs_help.empty()) sub->add_option("inputs", positionals, inputs_help);
    handlers.emplace_back(sub, h);
    return sub;
  };

  command(&app, "dist", "distance between two measures", cmd_dist, "mu0.csv mu1.csv");
  CLI::App* log = command(&app, "log", "tangent of mu1 at mu0", cmd_log, "mu0.csv mu1.csv");
  params.text(log, "--plan", "plan", "use this plan CSV instead of solving");
  CLI::App* exp = command(&app, "exp", "exponential of a tangent file", cmd_exp, "tangent.csv");
  params.number(exp, "--scale", "scale", "multiply the tangent before exponentiating");
  CLI::App* geo = command(&app, "geodesic", "points along the geodesic", cmd_geodesic, "mu0.csv mu1.csv");
  params.list(geo, "--times", "times", "comma-separated times in [0, 1]");
  params.text(geo, "--plan", "plan", "use this plan CSV instead of solving");
  command(&app, "pca", "tangent PCA of a dataset directory", cmd_pca, "dataset directory");
  CLI::App* shoot = command(&app, "shoot", "rasters along a principal mode", cmd_shoot, "dataset directory");
  params.integer(shoot, "--mode", "mode", "1-based mode index");
  params.number(shoot, "--sigma", "sigma", "range in standard deviations");
  params.integer(shoot, "--steps", "steps", "number of shots");
  params.integer(shoot, "--resolution", "resolution", "raster cells per axis");
  params.number(shoot, "--blur", "blur", "Gaussian blur in chart units (default one cell)");

  CLI::App* study = app.add_subcommand("study", "stability and convexity studies");
  study->require_subcommand(1);
  CLI::App* sk = command(study, "kappa", "HK logarithms against W2 as kappa grows", cmd_study_kappa,
                         "mu0.csv mu1.csv");
  params.list(sk, "--kappas", "kappas", "comma-separated kappa values");
  params.number(sk, "--tol", "tol", "slack for the monotonicity flags");
  CLI::App* sr = command(study, "refine", "logarithms under grid refinement", cmd_study_refine, "mu0.csv mu1.csv");
  params.list(sr, "--resolutions", "resolutions", "comma-separated cell counts");
  CLI::App* sc = command(study, "convexity", "two-point exchange probe", cmd_study_convexity, "");
  params.number(sc, "--spread", "spread", "half-angle of the source pair");
  params.number(sc, "--offset", "offset", "half-angle of the target pair");
  params.integer(sc, "--samples", "samples", "interior interpolation times");

  CLI::App* gen = app.add_subcommand("gen-data", "synthetic datasets");
  auto kind = std::make_shared<std::string>();
  gen->add_option("kind", *kind, "disk-line, disk-box, sphere-caps or dirac-line")->required();
  handlers.emplace_back(gen, cmd_gen_data);
  params.integer(gen, "--count", "count", "number of samples");
  params.number(gen, "--length", "length", "segment or box side length");
  params.number(gen, "--rmin", "rmin", "smallest disk radius (disk-box)");
  params.number(gen, "--rmax", "rmax", "largest disk radius (disk-box)");
  params.number(gen, "--spacing", "spacing", "grid spacing inside disks");
  params.number(gen, "--cap-angle", "cap_angle", "angular radius of sphere caps");
  params.integer(gen, "--points-per-cap", "points_per_cap", "atoms per sphere cap");

  CLI::App* oracle = app.add_subcommand("oracle", "closed-form and exact reference solutions");
  oracle->group("");
  oracle->require_subcommand(1);
  CLI::App* od = command(oracle, "dirac", "HK between two Diracs", cmd_oracle_dirac, "");
  params.number(od, "--m0", "m0", "first mass");
  params.number(od, "--m1", "m1", "second mass");
  params.number(od, "--distance", "distance", "distance between the atoms");
  command(oracle, "exact", "exact plan for tiny instances", cmd_oracle_exact, "mu0.csv mu1.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (o_config->count()) cfg = RunConfig::from_json(json::parse(io::read_text(config_path)));

    Handler handler = nullptr;
    for (const auto& [sub, h] : handlers) {
      if (sub->parsed()) {
        handler = h;
        cfg.command = sub->get_parent() == &app ? sub->get_name()
                                                : sub->get_parent()->get_name() + " " + sub->get_name();
      }
    }

    if (o_metric->count()) cfg.metric = parse_metric(metric);
    if (o_kappa->count()) cfg.kappa = kappa;
    if (o_eps->count()) cfg.solver.epsilon_target = epsilon;
    if (o_scaling->count()) cfg.solver.epsilon_scaling_factor = eps_scaling;
    if (o_iters->count()) cfg.solver.max_iters = max_iters;
    if (o_tol->count()) cfg.solver.marginal_tol = marginal_tol;
    if (o_out->count()) cfg.out = out_dir;
    if (o_seed->count()) cfg.seed = seed;
    if (o_norm->count()) cfg.normalize = true;
    if (o_manifold->count()) {
      cfg.manifold = make_manifold(manifold_kind, dim, radius);
    } else if (!cfg.manifold && o_radius->count() && cfg.command != "gen-data") {
      cfg.manifold = make_manifold("sphere", dim, radius);
    } else if (cfg.manifold && (o_radius->count() || o_dim->count()) && cfg.command != "gen-data") {
      const std::string k = cfg.manifold->kind() == Manifold::Kind::Sphere       ? "sphere"
                            : cfg.manifold->kind() == Manifold::Kind::Hyperbolic ? "hyperbolic"
                                                                                 : "euclidean";
      cfg.manifold = make_manifold(k, o_dim->count() ? dim : cfg.manifold->ambient_dim(),
                                   o_radius->count() ? radius : cfg.manifold->radius());
    }
    if (o_radius->count() && cfg.command == "gen-data") cfg.params["radius"] = radius;
    if (!positionals.empty()) cfg.inputs = positionals;
    if (gen->parsed()) cfg.params["kind"] = *kind;
    params.merge(cfg.params);
    if (cfg.kappa) cfg.solver.kappa = *cfg.kappa;
    cfg.solver.validate();

    handler(cfg, out);
    return 0;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lot::cli
