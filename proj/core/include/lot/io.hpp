#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "lot/analysis.hpp"
#include "lot/measure.hpp"
#include "lot/solver.hpp"
#include "lot/tangent.hpp"

namespace lot::io {

namespace fs = std::filesystem;

/// 12 significant digits, the precision used for every text output.
std::string fmt(double x);

/// Sidecar descriptor path: same stem with a .json extension.
fs::path sidecar_path(const fs::path& csv);

/// Reads `x1,...,xn,mass` rows. The manifold comes from the sidecar when it
/// exists, otherwise Euclidean of the header dimension.
DiscreteMeasure read_measure(const fs::path& csv);
/// Writes the CSV and its sidecar.
void write_measure(const DiscreteMeasure& mu, const fs::path& csv);

std::string manifold_json(const Manifold& m);
Manifold manifold_from_json(const std::string& text);

/// Tangent as stored on disk: rows `x1..xn,mass,v1..vn,alpha`, the singular
/// part in `<stem>.singular.csv`, metric and kappa in the sidecar.
struct TangentRecord {
  MetricKind metric = MetricKind::W2;
  double kappa = 1.0;
  DiscreteMeasure reference;
  Embedding embedding;
};

void write_tangent(const TangentRecord& t, const fs::path& csv);
TangentRecord read_tangent(const fs::path& csv);

void write_matrix_csv(const Eigen::MatrixXd& m, const fs::path& csv, const std::string& header = "");
/// Dense numeric matrix; a non-numeric first line is taken as a header and skipped.
Eigen::MatrixXd read_matrix_csv(const fs::path& csv);
/// One file per side, a single `phi` column each.
void write_potentials(const DualPotentials& pot, const fs::path& csv0, const fs::path& csv1);

/// Plain PGM (P2) with values scaled to 0..65535, top row = largest y.
void write_pgm(const RasterImage& img, const fs::path& path);
/// Raw cell values, same orientation as the PGM.
void write_raster_csv(const RasterImage& img, const fs::path& path);

std::string solver_config_json(const SolverConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
SolverConfig solver_config_from_json(const std::string& text);

/// `<dir>/<name>.csv` with one column per series and `<dir>/<name>.json`.
void write_report(const StudyReport& r, const fs::path& dir);
std::string report_json(const StudyReport& r);

/// eigenvalues.csv, projections.csv, mean tangent, one tangent per mode and summary.json.
void write_pca(const PcaResult& r, const DiscreteMeasure& reference, const Metric& metric, const fs::path& dir);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace lot::io
