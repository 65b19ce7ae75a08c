#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lot/analysis.hpp"
#include "lot/solver.hpp"

namespace lot::cli {

using json = nlohmann::ordered_json;

/// One experiment: a config file plus flag overrides, fully resolved.
struct RunConfig {
  std::string command;
  MetricKind metric = MetricKind::W2;
  std::optional<double> kappa;
  SolverConfig solver;
  std::optional<Manifold> manifold;
  std::vector<std::string> inputs;
  std::string out;
  std::uint64_t seed = 0;
  bool normalize = false;
  json params = json::object();  ///< command-specific settings

  /// Enforces that kappa is given exactly when the metric is hk or shk.
  Metric metric_spec() const;

  double param(const std::string& key, double fallback) const;
  int param_int(const std::string& key, int fallback) const;
  std::string param_str(const std::string& key, const std::string& fallback) const;
  std::vector<double> param_list(const std::string& key, const std::vector<double>& fallback) const;

  json to_json() const;
  static RunConfig from_json(const json& j);
};

/// Rounds to the 12 significant digits used for every printed number.
double round12(double x);

}  // namespace lot::cli
