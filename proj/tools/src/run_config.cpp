#include "lot/cli/run_config.hpp"

#include <cmath>

#include "lot/error.hpp"
#include "lot/io.hpp"

namespace lot::cli {

double round12(double x) { return std::isfinite(x) ? std::stod(io::fmt(x)) : x; }

Metric RunConfig::metric_spec() const {
  if (metric == MetricKind::W2) {
    if (kappa) throw InvalidInputError("kappa only applies to the hk and shk metrics");
    return {MetricKind::W2, 1.0};
  }
  if (!kappa) throw InvalidInputError(std::string("metric ") + metric_name(metric) + " needs kappa");
  if (!(*kappa > 0.0) || !std::isfinite(*kappa)) throw InvalidInputError("kappa must be positive");
  return {metric, *kappa};
}

double RunConfig::param(const std::string& key, double fallback) const {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) throw InvalidInputError("parameter '" + key + "' must be a number");
  return params[key].get<double>();
}

int RunConfig::param_int(const std::string& key, int fallback) const {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number_integer()) throw InvalidInputError("parameter '" + key + "' must be an integer");
  return params[key].get<int>();
}

std::string RunConfig::param_str(const std::string& key, const std::string& fallback) const {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_string()) throw InvalidInputError("parameter '" + key + "' must be a string");
  return params[key].get<std::string>();
}

std::vector<double> RunConfig::param_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!params.contains(key)) return fallback;
  const json& v = params[key];
  if (!v.is_array()) throw InvalidInputError("parameter '" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InvalidInputError("parameter '" + key + "' must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["metric"] = metric_name(metric);
  j["kappa"] = kappa ? json(*kappa) : json(nullptr);
  json s = json::parse(io::solver_config_json(solver));
  s.erase("kappa");
  j["solver"] = s;
  j["manifold"] = manifold ? json::parse(io::manifold_json(*manifold)) : json(nullptr);
  j["inputs"] = inputs;
  j["out"] = out;
  j["seed"] = seed;
  j["normalize"] = normalize;
  j["params"] = params;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw InvalidInputError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "metric") c.metric = parse_metric(v.get<std::string>());
      else if (key == "kappa") { if (!v.is_null()) c.kappa = v.get<double>(); }
      else if (key == "solver") c.solver = io::solver_config_from_json(v.dump());
      else if (key == "manifold") { if (!v.is_null()) c.manifold = io::manifold_from_json(v.dump()); }
      else if (key == "inputs") c.inputs = v.get<std::vector<std::string>>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "normalize") c.normalize = v.get<bool>();
      else if (key == "params") {
        if (!v.is_object()) throw InvalidInputError("config: params must be an object");
        c.params = v;
      } else {
        throw InvalidInputError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("config: ") + e.what());
  }
  if (c.kappa) c.solver.kappa = *c.kappa;
  c.solver.validate();
  return c;
}

}  // namespace lot::cli
