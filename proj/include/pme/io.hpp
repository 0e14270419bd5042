#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pme/embedding.hpp"
#include "pme/errors.hpp"
#include "pme/surrogate.hpp"
#include "pme/types.hpp"

namespace pme::io {

// 17 significant digits: round-trips IEEE doubles exactly.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline double parse_double(const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) throw ValidationError("not a number: '" + text + "'");
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    fields.push_back(field.substr(start));
  }
  return fields;
}

// Block CSV: header row of sample ids, then one line per data row with one
// column per sample.
inline void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                             const std::vector<std::string>& ids) {
  if (static_cast<Eigen::Index>(ids.size()) != matrix.cols())
    throw ValidationError("write_matrix_csv: id count does not match columns");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  for (std::size_t j = 0; j < ids.size(); ++j) out << (j ? "," : "") << ids[j];
  out << "\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      out << (j ? "," : "") << format_double(matrix(i, j));
    out << "\n";
  }
}

struct CsvMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> ids;
};

inline CsvMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty csv: " + path.string());
  CsvMatrix result;
  result.ids = split_csv_line(line);
  const auto cols = result.ids.size();
  if (cols == 0) throw ValidationError("csv without columns: " + path.string());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != cols)
      throw ValidationError("ragged csv row in " + path.string());
    std::vector<double> row(cols);
    for (std::size_t j = 0; j < cols; ++j) row[j] = parse_double(fields[j]);
    rows.push_back(std::move(row));
  }
  result.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return result;
}

// Measures CSV: one positive real per line.
inline void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& values) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  for (Eigen::Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << "\n";
}

inline Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    values.push_back(parse_double(line));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[i];
  return out;
}

// Names the block files of one snapshot dataset. Paths are relative to the
// manifest's directory.
struct Manifest {
  Eigen::Index design_count = 0;        // M
  Eigen::Index geometry_components = 1; // n
  Eigen::Index stations = 0;            // L
  std::string u_block;                  // required
  std::string d_block;                  // optional
  std::string f_block;                  // optional
  std::string c_block;                  // optional
  std::string geometry_measures;        // required with d_block
  std::string physics_measures;         // optional
  std::string feasible;                 // optional: one 0/1 row under the id header
  std::vector<OperatingCondition> conditions;
};

inline void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  nlohmann::json doc;
  doc["schema"] = "pme-manifest-v1";
  doc["design_count"] = manifest.design_count;
  doc["geometry_components"] = manifest.geometry_components;
  doc["stations"] = manifest.stations;
  nlohmann::json blocks;
  blocks["u"] = manifest.u_block;
  if (!manifest.d_block.empty()) blocks["d"] = manifest.d_block;
  if (!manifest.f_block.empty()) blocks["f"] = manifest.f_block;
  if (!manifest.c_block.empty()) blocks["c"] = manifest.c_block;
  doc["blocks"] = blocks;
  nlohmann::json measures;
  if (!manifest.geometry_measures.empty()) measures["geometry"] = manifest.geometry_measures;
  if (!manifest.physics_measures.empty()) measures["physics"] = manifest.physics_measures;
  doc["measures"] = measures;
  if (!manifest.feasible.empty()) doc["feasible"] = manifest.feasible;
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& oc : manifest.conditions)
    conditions.push_back({{"name", oc.name}, {"rows", oc.rows}});
  doc["operating_conditions"] = conditions;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid manifest json: " + std::string(e.what()));
  }
  if (doc.value("schema", "") != "pme-manifest-v1")
    throw ValidationError("unsupported manifest schema in " + path.string());
  Manifest manifest;
  manifest.design_count = doc.at("design_count").get<Eigen::Index>();
  manifest.geometry_components = doc.value("geometry_components", Eigen::Index{1});
  manifest.stations = doc.value("stations", Eigen::Index{0});
  const auto& blocks = doc.at("blocks");
  manifest.u_block = blocks.at("u").get<std::string>();
  manifest.d_block = blocks.value("d", "");
  manifest.f_block = blocks.value("f", "");
  manifest.c_block = blocks.value("c", "");
  if (doc.contains("measures")) {
    manifest.geometry_measures = doc["measures"].value("geometry", "");
    manifest.physics_measures = doc["measures"].value("physics", "");
  }
  manifest.feasible = doc.value("feasible", "");
  if (doc.contains("operating_conditions"))
    for (const auto& oc : doc["operating_conditions"])
      manifest.conditions.push_back({oc.value("name", ""), oc.value("rows", Eigen::Index{0})});
  return manifest;
}

struct LoadedDataset {
  std::vector<RawSample> samples;
  ElementMeasures measures;
  Manifest manifest;
};

inline LoadedDataset load_dataset(const std::filesystem::path& manifest_path) {
  LoadedDataset data;
  data.manifest = read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();

  const CsvMatrix u = read_matrix_csv(base / data.manifest.u_block);
  if (u.values.rows() != data.manifest.design_count)
    throw ValidationError("u block row count does not match the manifest design_count");
  const auto S = u.values.cols();

  CsvMatrix d, f, c;
  if (!data.manifest.d_block.empty()) d = read_matrix_csv(base / data.manifest.d_block);
  if (!data.manifest.f_block.empty()) f = read_matrix_csv(base / data.manifest.f_block);
  if (!data.manifest.c_block.empty()) c = read_matrix_csv(base / data.manifest.c_block);
  for (const CsvMatrix* block : {&d, &f, &c})
    if (block->values.size() > 0 && block->values.cols() != S)
      throw ValidationError("block sample count mismatch against u block");

  std::vector<char> feasible(static_cast<std::size_t>(S), 1);
  if (!data.manifest.feasible.empty()) {
    const CsvMatrix flags = read_matrix_csv(base / data.manifest.feasible);
    if (flags.values.cols() != S || flags.values.rows() != 1)
      throw ValidationError("feasible file must hold one row with one flag per sample");
    for (Eigen::Index j = 0; j < S; ++j)
      feasible[static_cast<std::size_t>(j)] = flags.values(0, j) != 0.0;
  }

  data.samples.reserve(static_cast<std::size_t>(S));
  for (Eigen::Index j = 0; j < S; ++j) {
    RawSample s;
    s.id = u.ids[static_cast<std::size_t>(j)];
    s.u = u.values.col(j);
    if (d.values.size() > 0) s.d = d.values.col(j);
    if (f.values.size() > 0) s.f = f.values.col(j);
    if (c.values.size() > 0) s.c = c.values.col(j);
    s.feasible = feasible[static_cast<std::size_t>(j)] != 0;
    data.samples.push_back(std::move(s));
  }

  if (!data.manifest.geometry_measures.empty())
    data.measures.geometry = read_vector_csv(base / data.manifest.geometry_measures);
  if (!data.manifest.physics_measures.empty())
    data.measures.physics = read_vector_csv(base / data.manifest.physics_measures);
  return data;
}

namespace detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& node) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(node.size()));
  Eigen::Index i = 0;
  for (const auto& value : node) out[i++] = value.get<double>();
  return out;
}

// Matrices are stored row-major as flat arrays with explicit row counts.
inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& node, Eigen::Index rows,
                                        Eigen::Index cols) {
  if (static_cast<Eigen::Index>(node.size()) != rows * cols)
    throw ValidationError("model json: matrix payload size mismatch");
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index flat = 0;
  for (const auto& value : node) {
    out(flat / cols, flat % cols) = value.get<double>();
    ++flat;
  }
  return out;
}

}  // namespace detail

inline void save_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  nlohmann::json doc;
  doc["schema"] = "pme-model-v1";
  doc["mode"] = to_string(model.mode);
  doc["confidence"] = model.confidence;
  doc["dimensions"] = {
      {"design_count", model.design_count},
      {"geometry_rows", model.geometry_rows},
      {"distributed_rows", model.distributed_rows},
      {"lumped_rows", model.lumped_rows},
      {"geometry_components", model.geometry_components},
      {"stations", model.stations},
      {"samples", model.theta.rows()},
      {"rank", model.rank()},
  };
  doc["means"] = {
      {"u", detail::vector_to_json(model.mean_u)},
      {"d", detail::vector_to_json(model.mean_d)},
      {"f", detail::vector_to_json(model.mean_f)},
      {"c", detail::vector_to_json(model.mean_c)},
  };
  doc["eigenvalues"] = detail::vector_to_json(model.eigenvalues);
  doc["total_variance"] = model.total_variance;
  doc["modes"] = {
      {"q", detail::matrix_to_json(model.q)},
      {"v", detail::matrix_to_json(model.v)},
      {"phi", detail::matrix_to_json(model.phi)},
      {"pi", detail::matrix_to_json(model.pi)},
  };
  doc["gw"] = detail::vector_to_json(model.gw);
  doc["theta"] = detail::matrix_to_json(model.theta);
  doc["bounds"] = {
      {"lower", detail::vector_to_json(model.lower_bounds)},
      {"upper", detail::vector_to_json(model.upper_bounds)},
  };
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& oc : model.conditions)
    conditions.push_back({{"name", oc.name}, {"rows", oc.rows}});
  doc["operating_conditions"] = conditions;
  doc["provenance"] = {
      {"sample_count", model.provenance.sample_count},
      {"filter_report",
       {{"input", model.provenance.filter_report.input},
        {"infeasible", model.provenance.filter_report.infeasible},
        {"non_finite", model.provenance.filter_report.non_finite},
        {"iqr", model.provenance.filter_report.iqr},
        {"retained", model.provenance.filter_report.retained}}},
      {"config_hash", model.provenance.config_hash},
      {"created_at", model.provenance.created_at},
      {"warnings", model.provenance.warnings},
  };

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

inline EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid model json: " + std::string(e.what()));
  }
  if (doc.value("schema", "") != "pme-model-v1")
    throw ValidationError("unsupported model schema in " + path.string());

  EmbeddingModel model;
  const std::string mode = doc.at("mode").get<std::string>();
  if (mode == "pme") model.mode = Mode::pme;
  else if (mode == "pi-pme") model.mode = Mode::pi_pme;
  else if (mode == "pd-pme") model.mode = Mode::pd_pme;
  else throw ValidationError("unknown mode in model json: " + mode);

  model.confidence = doc.value("confidence", 0.95);
  const auto& dims = doc.at("dimensions");
  model.design_count = dims.at("design_count").get<Eigen::Index>();
  model.geometry_rows = dims.at("geometry_rows").get<Eigen::Index>();
  model.distributed_rows = dims.at("distributed_rows").get<Eigen::Index>();
  model.lumped_rows = dims.at("lumped_rows").get<Eigen::Index>();
  model.geometry_components = dims.value("geometry_components", Eigen::Index{1});
  model.stations = dims.value("stations", Eigen::Index{0});
  const auto samples = dims.at("samples").get<Eigen::Index>();
  const auto rank = dims.at("rank").get<Eigen::Index>();

  const auto& means = doc.at("means");
  model.mean_u = detail::vector_from_json(means.at("u"));
  model.mean_d = detail::vector_from_json(means.at("d"));
  model.mean_f = detail::vector_from_json(means.at("f"));
  model.mean_c = detail::vector_from_json(means.at("c"));
  model.eigenvalues = detail::vector_from_json(doc.at("eigenvalues"));
  model.total_variance = doc.at("total_variance").get<double>();
  const auto& modes = doc.at("modes");
  model.q = detail::matrix_from_json(modes.at("q"), model.geometry_rows, rank);
  model.v = detail::matrix_from_json(modes.at("v"), model.design_count, rank);
  model.phi = detail::matrix_from_json(modes.at("phi"), model.distributed_rows, rank);
  model.pi = detail::matrix_from_json(modes.at("pi"), model.lumped_rows, rank);
  model.gw = detail::vector_from_json(doc.at("gw"));
  model.theta = detail::matrix_from_json(doc.at("theta"), samples, rank);
  model.lower_bounds = detail::vector_from_json(doc.at("bounds").at("lower"));
  model.upper_bounds = detail::vector_from_json(doc.at("bounds").at("upper"));
  if (doc.contains("operating_conditions"))
    for (const auto& oc : doc["operating_conditions"])
      model.conditions.push_back({oc.value("name", ""), oc.value("rows", Eigen::Index{0})});
  if (doc.contains("provenance")) {
    const auto& prov = doc["provenance"];
    model.provenance.sample_count = prov.value("sample_count", std::size_t{0});
    if (prov.contains("filter_report")) {
      const auto& fr = prov["filter_report"];
      model.provenance.filter_report.input = fr.value("input", std::size_t{0});
      model.provenance.filter_report.infeasible = fr.value("infeasible", std::size_t{0});
      model.provenance.filter_report.non_finite = fr.value("non_finite", std::size_t{0});
      model.provenance.filter_report.iqr = fr.value("iqr", std::size_t{0});
      model.provenance.filter_report.retained = fr.value("retained", std::size_t{0});
    }
    model.provenance.config_hash = prov.value("config_hash", "");
    model.provenance.created_at = prov.value("created_at", "");
    if (prov.contains("warnings"))
      for (const auto& w : prov["warnings"]) model.provenance.warnings.push_back(w.get<std::string>());
  }

  if (model.eigenvalues.size() != rank)
    throw ValidationError("model json: eigenvalue count does not match rank");
  return model;
}

inline void save_case(const std::filesystem::path& path, const SyntheticCase::Config& config) {
  nlohmann::json doc;
  doc["schema"] = "pme-case-v1";
  doc["kind"] = "synthetic";
  doc["design_count"] = config.design_count;
  doc["stations"] = config.stations;
  doc["alpha"] = config.alpha;
  doc["bump_width"] = config.bump_width;
  doc["coupled"] = config.coupled;
  doc["fourier_terms"] = config.fourier_terms;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

inline SyntheticCase::Config load_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid case json: " + std::string(e.what()));
  }
  if (doc.value("schema", "") != "pme-case-v1")
    throw ValidationError("unsupported case schema in " + path.string());
  SyntheticCase::Config config;
  config.design_count = doc.at("design_count").get<int>();
  config.stations = doc.at("stations").get<int>();
  config.alpha = doc.at("alpha").get<double>();
  config.bump_width = doc.at("bump_width").get<double>();
  config.coupled = doc.at("coupled").get<std::vector<int>>();
  config.fourier_terms = doc.at("fourier_terms").get<int>();
  return config;
}

}  // namespace pme::io
