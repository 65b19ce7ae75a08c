#include "lot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "lot/error.hpp"

namespace lot::io {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const fs::path& file, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    std::ostringstream os;
    os << file.string() << ":" << line << ": not a number: '" << s << "'";
    throw InvalidInputError(os.str());
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw InvalidInputError("cannot open " + csv.string());
  Table t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << csv.string() << ":" << lineno << ": expected " << t.header.size() << " columns, got " << cells.size();
      throw InvalidInputError(os.str());
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, csv, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw InvalidInputError(csv.string() + ": missing header");
  return t;
}

json manifold_to_json(const Manifold& m) {
  json j;
  j["manifold"] = m.name();
  j["dim"] = m.ambient_dim();
  j["radius"] = m.radius();
  return j;
}

Manifold manifold_from(const json& j) {
  const std::string kind = j.value("manifold", std::string("euclidean"));
  const int dim = j.value("dim", 0);
  if (kind == "euclidean") return Manifold::euclidean(dim);
  if (kind == "sphere") return Manifold::sphere(j.value("radius", 1.0), dim == 0 ? 3 : dim);
  if (kind == "hyperbolic") return Manifold::hyperbolic(dim == 0 ? 3 : dim);
  throw InvalidInputError("unknown manifold '" + kind + "'");
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInputError(what + ": " + e.what());
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  return out;
}

json series_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string manifold_json(const Manifold& m) { return manifold_to_json(m).dump(2); }

Manifold manifold_from_json(const std::string& text) {
  try {
    return manifold_from(parse_json(text, "manifold descriptor"));
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("manifold descriptor: ") + e.what());
  }
}

DiscreteMeasure read_measure(const fs::path& csv) {
  const Table t = read_table(csv);
  const int n = static_cast<int>(t.header.size()) - 1;
  if (n < 1 || t.header.back() != "mass") {
    throw InvalidInputError(csv.string() + ": header must be x1,...,xn,mass");
  }
  Manifold m = Manifold::euclidean(n);
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    m = manifold_from_json(read_text(side));
    if (m.ambient_dim() != n) throw InvalidInputError(side.string() + ": dimension disagrees with the CSV header");
  }
  Eigen::MatrixXd pts(t.rows.size(), n);
  Eigen::VectorXd mass(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (int a = 0; a < n; ++a) pts(i, a) = t.rows[i][a];
    mass(i) = t.rows[i][n];
  }
  try {
    return DiscreteMeasure(m, pts, mass);
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(csv.string() + ": " + e.what());
  }
}

void write_measure(const DiscreteMeasure& mu, const fs::path& csv) {
  auto out = open_out(csv);
  const int n = mu.manifold().ambient_dim();
  for (int a = 0; a < n; ++a) out << "x" << a + 1 << ",";
  out << "mass\n";
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    for (int a = 0; a < n; ++a) out << fmt(mu.points()(i, a)) << ",";
    out << fmt(mu.mass(i)) << "\n";
  }
  write_text(sidecar_path(csv), manifold_json(mu.manifold()) + "\n");
}

namespace {

fs::path singular_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension();
  p += ".singular.csv";
  return p;
}

}  // namespace

void write_tangent(const TangentRecord& t, const fs::path& csv) {
  const DiscreteMeasure& ref = t.reference;
  const int n = ref.manifold().ambient_dim();
  if (t.embedding.velocity.rows() != ref.size() || t.embedding.growth.size() != ref.size()) {
    throw InvalidInputError("write_tangent: tangent does not match its reference");
  }
  auto out = open_out(csv);
  for (int a = 0; a < n; ++a) out << "x" << a + 1 << ",";
  out << "mass,";
  for (int a = 0; a < n; ++a) out << "v" << a + 1 << ",";
  out << "alpha\n";
  for (Eigen::Index i = 0; i < ref.size(); ++i) {
    for (int a = 0; a < n; ++a) out << fmt(ref.points()(i, a)) << ",";
    out << fmt(ref.mass(i)) << ",";
    for (int a = 0; a < n; ++a) out << fmt(t.embedding.velocity(i, a)) << ",";
    out << fmt(t.embedding.growth(i)) << "\n";
  }
  json side = manifold_to_json(ref.manifold());
  side["metric"] = metric_name(t.metric);
  side["kappa"] = t.kappa;
  side["singular"] = singular_path(csv).filename().string();
  write_text(sidecar_path(csv), side.dump(2) + "\n");
  DiscreteMeasure sing = t.embedding.singular;
  if (sing.empty()) sing = DiscreteMeasure(ref.manifold(), Eigen::MatrixXd(0, n), Eigen::VectorXd(0));
  write_measure(sing, singular_path(csv));
}

TangentRecord read_tangent(const fs::path& csv) {
  const fs::path side_path = sidecar_path(csv);
  if (!fs::exists(side_path)) throw InvalidInputError(csv.string() + ": missing sidecar " + side_path.string());
  const json side = parse_json(read_text(side_path), side_path.string());
  TangentRecord r;
  try {
    r.metric = parse_metric(side.value("metric", std::string("w2")));
    r.kappa = side.value("kappa", 1.0);
  } catch (const json::exception& e) {
    throw InvalidInputError(side_path.string() + ": " + e.what());
  }
  const Manifold m = manifold_from(side);
  const int n = m.ambient_dim();
  const Table t = read_table(csv);
  if (static_cast<int>(t.header.size()) != 2 * n + 2) {
    throw InvalidInputError(csv.string() + ": header must be x1..xn,mass,v1..vn,alpha");
  }
  Eigen::MatrixXd pts(t.rows.size(), n), vel(t.rows.size(), n);
  Eigen::VectorXd mass(t.rows.size()), alpha(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (int a = 0; a < n; ++a) {
      pts(i, a) = t.rows[i][a];
      vel(i, a) = t.rows[i][n + 1 + a];
    }
    mass(i) = t.rows[i][n];
    alpha(i) = t.rows[i][2 * n + 1];
  }
  r.reference = DiscreteMeasure(m, pts, mass);
  r.embedding.velocity = vel;
  r.embedding.growth = alpha;
  const fs::path sp = singular_path(csv);
  r.embedding.singular = fs::exists(sp) ? read_measure(sp) : DiscreteMeasure(m, Eigen::MatrixXd(0, n), Eigen::VectorXd(0));
  return r;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const fs::path& csv, const std::string& header) {
  auto out = open_out(csv);
  if (!header.empty()) out << header << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << fmt(m(i, j));
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw InvalidInputError("cannot open " + csv.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (rows.empty() && lineno == 1) {
      char* end = nullptr;
      std::strtod(cells.front().c_str(), &end);
      if (cells.front().empty() || end != cells.front().c_str() + cells.front().size()) continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, csv, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << csv.string() << ":" << lineno << ": ragged row";
      throw InvalidInputError(os.str());
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_potentials(const DualPotentials& pot, const fs::path& csv0, const fs::path& csv1) {
  write_matrix_csv(pot.phi0, csv0, "phi");
  write_matrix_csv(pot.phi1, csv1, "phi");
}

namespace {

int raster_height(const RasterImage& img) { return img.grid.dims() >= 2 ? img.grid.resolution[1] : 1; }

}  // namespace

void write_pgm(const RasterImage& img, const fs::path& path) {
  if (img.grid.dims() > 2) throw UnsupportedError("write_pgm: only 1-D and 2-D rasters");
  const int w = img.grid.resolution[0];
  const int h = raster_height(img);
  const double mx = img.values.size() ? img.values.maxCoeff() : 0.0;
  auto out = open_out(path);
  out << "P2\n" << w << " " << h << "\n65535\n";
  for (int j = h - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) {
      const double v = mx > 0.0 ? img.at(i, j) / mx : 0.0;
      out << (i ? " " : "") << static_cast<long>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    }
    out << "\n";
  }
}

void write_raster_csv(const RasterImage& img, const fs::path& path) {
  if (img.grid.dims() > 2) throw UnsupportedError("write_raster_csv: only 1-D and 2-D rasters");
  const int w = img.grid.resolution[0];
  const int h = raster_height(img);
  auto out = open_out(path);
  for (int j = h - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) out << (i ? "," : "") << fmt(img.at(i, j));
    out << "\n";
  }
}

std::string solver_config_json(const SolverConfig& cfg) {
  json j;
  j["epsilon_target"] = cfg.epsilon_target;
  j["epsilon_scaling_factor"] = cfg.epsilon_scaling_factor;
  j["max_iters"] = cfg.max_iters;
  j["marginal_tol"] = cfg.marginal_tol;
  j["kappa"] = cfg.kappa;
  return j.dump(2);
}

SolverConfig solver_config_from_json(const std::string& text) {
  const json j = parse_json(text, "solver config");
  if (!j.is_object()) throw InvalidInputError("solver config must be a JSON object");
  SolverConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "epsilon_target") cfg.epsilon_target = value.get<double>();
      else if (key == "epsilon_scaling_factor") cfg.epsilon_scaling_factor = value.get<double>();
      else if (key == "max_iters") cfg.max_iters = value.get<int>();
      else if (key == "marginal_tol") cfg.marginal_tol = value.get<double>();
      else if (key == "kappa") cfg.kappa = value.get<double>();
      else throw InvalidInputError("solver config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("solver config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string report_json(const StudyReport& r) {
  json j;
  j["name"] = r.name;
  json flags = json::object();
  for (const auto& [k, v] : r.flags) flags[k] = v;
  j["flags"] = flags;
  json scalars = json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = v;
  j["scalars"] = scalars;
  json series = json::object();
  for (const auto& [k, v] : r.series) series[k] = series_json(v);
  j["series"] = series;
  j["notes"] = r.notes;
  return j.dump(2);
}

void write_report(const StudyReport& r, const fs::path& dir) {
  std::size_t rows = 0;
  for (const auto& s : r.series) rows = std::max(rows, s.second.size());
  auto out = open_out(dir / (r.name + ".csv"));
  for (std::size_t k = 0; k < r.series.size(); ++k) out << (k ? "," : "") << r.series[k].first;
  out << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < r.series.size(); ++k) {
      const auto& v = r.series[k].second;
      out << (k ? "," : "") << (i < v.size() ? fmt(v[i]) : "");
    }
    out << "\n";
  }
  write_text(dir / (r.name + ".json"), report_json(r) + "\n");
}

void write_pca(const PcaResult& r, const DiscreteMeasure& reference, const Metric& metric, const fs::path& dir) {
  Eigen::MatrixXd ev(r.eigenvalues.size(), 2);
  ev << r.eigenvalues, r.explained_ratio;
  write_matrix_csv(ev, dir / "eigenvalues.csv", "eigenvalue,explained_ratio");
  std::string header;
  for (Eigen::Index j = 0; j < r.projections.cols(); ++j) header += (j ? ",pc" : "pc") + std::to_string(j + 1);
  write_matrix_csv(r.projections, dir / "projections.csv", header);
  write_tangent({metric.kind, metric.kappa, reference, r.mean}, dir / "mean.csv");
  for (std::size_t k = 0; k < r.modes.size(); ++k) {
    write_tangent({metric.kind, metric.kappa, reference, r.modes[k]}, dir / ("mode_" + std::to_string(k + 1) + ".csv"));
  }
  json s;
  s["metric"] = metric_name(metric.kind);
  s["kappa"] = metric.kappa;
  s["samples"] = r.projections.rows();
  s["modes"] = r.modes.size();
  s["eigenvalues"] = series_json(std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size()));
  const double l1 = r.eigenvalues.size() ? r.eigenvalues(0) : 0.0;
  s["lambda2_over_lambda1"] = r.eigenvalues.size() > 1 && l1 > 0.0 ? r.eigenvalues(1) / l1 : 0.0;
  write_text(dir / "summary.json", s.dump(2) + "\n");
}

}  // namespace lot::io
