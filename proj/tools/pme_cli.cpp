// Command-line front end: Sobol sampling, synthetic-case simulation, embedding
// fits, plot-ready reports, reconstruction, contour and convergence exports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pme/pme.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

pme::Mode parse_mode(const std::string& text) {
  if (text == "pme") return pme::Mode::pme;
  if (text == "pi-pme") return pme::Mode::pi_pme;
  if (text == "pd-pme") return pme::Mode::pd_pme;
  throw pme::ValidationError("unknown mode '" + text + "' (expected pme, pi-pme or pd-pme)");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& field : pme::io::split_csv_line(text)) {
    if (field.empty()) continue;
    values.push_back(pme::io::parse_double(field));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (double v : parse_double_list(text)) values.push_back(static_cast<int>(v));
  return values;
}

// Bounds file: one "lo,hi" line per variable.
std::vector<std::pair<double, double>> read_bounds(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw pme::ValidationError("cannot open: " + path.string());
  std::vector<std::pair<double, double>> bounds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = pme::io::split_csv_line(line);
    if (fields.size() != 2)
      throw pme::ValidationError("bounds file must hold 'lo,hi' per line: " + path.string());
    bounds.emplace_back(pme::io::parse_double(fields[0]), pme::io::parse_double(fields[1]));
  }
  return bounds;
}

void write_bounds(const fs::path& path, const Eigen::VectorXd& amplitudes) {
  std::ofstream out(path);
  if (!out) throw pme::ValidationError("cannot open for writing: " + path.string());
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i)
    out << pme::io::format_double(-amplitudes[i]) << "," << pme::io::format_double(amplitudes[i])
        << "\n";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw pme::ValidationError("cannot open for writing: " + path.string());
  return out;
}

int run_sample(int dim, std::size_t count, std::size_t skip, const std::string& bounds_path,
               const std::string& out_path) {
  std::vector<std::pair<double, double>> bounds;
  if (!bounds_path.empty()) {
    bounds = read_bounds(bounds_path);
    if (static_cast<int>(bounds.size()) != dim)
      throw pme::ValidationError("bounds file rows do not match --dim");
  } else {
    bounds.assign(static_cast<std::size_t>(dim), {0.0, 1.0});
  }
  const Eigen::MatrixXd designs = pme::sobol_sample(bounds, count, skip);
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < count; ++j) ids.push_back("s" + std::to_string(j));
  pme::io::write_matrix_csv(out_path, designs, ids);
  std::cout << "wrote " << count << " Sobol designs of dimension " << dim << " to " << out_path
            << "\n";
  return 0;
}

pme::SyntheticCase::Config case_config_from_flags(int dim, int stations, double alpha,
                                                  double width, const std::string& coupled,
                                                  int fourier) {
  pme::SyntheticCase::Config cfg;
  cfg.design_count = dim;
  cfg.stations = stations;
  cfg.alpha = alpha;
  cfg.bump_width = width;
  if (!coupled.empty())
    cfg.coupled = parse_int_list(coupled);
  else if (dim < 3)
    cfg.coupled = {0};
  cfg.fourier_terms = fourier;
  return cfg;
}

int run_case(const pme::SyntheticCase::Config& cfg, const std::string& out_bounds,
             const std::string& out_case) {
  const pme::SyntheticCase sc(cfg);
  if (!out_bounds.empty()) write_bounds(out_bounds, sc.amplitude_bounds());
  if (!out_case.empty()) pme::io::save_case(out_case, cfg);
  std::cout << "synthetic case: M=" << cfg.design_count << " L=" << cfg.stations
            << " coupled=" << cfg.coupled.size() << "\n";
  return 0;
}

int run_simulate(const std::string& kind, const std::string& samples_path,
                 const std::string& out_dir, int stations, double alpha, double width,
                 const std::string& coupled_text, int fourier) {
  if (kind != "synthetic")
    throw pme::ValidationError("unknown case '" + kind + "' (only 'synthetic' is built in)");
  const auto u = pme::io::read_matrix_csv(samples_path);
  const auto cfg = case_config_from_flags(static_cast<int>(u.values.rows()), stations, alpha,
                                          width, coupled_text, fourier);
  const pme::SyntheticCase sc(cfg);

  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const auto S = u.values.cols();
  Eigen::MatrixXd d(sc.stations(), S), f(sc.stations(), S), c(sc.lumped_count(), S);
  for (Eigen::Index j = 0; j < S; ++j) {
    d.col(j) = sc.geometry(u.values.col(j));
    auto phys = sc.physics(u.values.col(j));
    f.col(j) = phys.f;
    c.col(j) = phys.c;
  }
  pme::io::write_matrix_csv(dir / "u.csv", u.values, u.ids);
  pme::io::write_matrix_csv(dir / "d.csv", d, u.ids);
  pme::io::write_matrix_csv(dir / "f.csv", f, u.ids);
  pme::io::write_matrix_csv(dir / "c.csv", c, u.ids);
  pme::io::write_vector_csv(dir / "geometry_measures.csv", sc.geometry_measures());
  pme::io::write_vector_csv(dir / "physics_measures.csv", sc.physics_measures());

  pme::io::Manifest manifest;
  manifest.design_count = u.values.rows();
  manifest.geometry_components = 1;
  manifest.stations = sc.stations();
  manifest.u_block = "u.csv";
  manifest.d_block = "d.csv";
  manifest.f_block = "f.csv";
  manifest.c_block = "c.csv";
  manifest.geometry_measures = "geometry_measures.csv";
  manifest.physics_measures = "physics_measures.csv";
  manifest.conditions = {{"design-point", sc.stations()}};
  pme::io::write_manifest(dir / "manifest.json", manifest);
  pme::io::save_case(dir / "case.json", cfg);

  std::cout << "simulated " << S << " samples into " << out_dir << "\n";
  return 0;
}

int run_fit(const std::string& mode_text, const std::string& manifest_path, double confidence,
            double iqr_k, double rank_tol, const std::string& out_path) {
  pme::EmbeddingConfig config;
  config.mode = parse_mode(mode_text);
  config.confidence = confidence;
  config.iqr_k = iqr_k;
  config.rank_tol = rank_tol;

  const auto data = pme::io::load_dataset(manifest_path);
  const auto set = pme::assemble(data.samples, data.measures, config.mode, config.iqr_k,
                                 data.manifest.conditions, data.manifest.geometry_components,
                                 data.manifest.stations);
  const auto model = pme::fit(set, config);
  pme::io::save_model(out_path, model);

  const auto n = pme::truncate(model, confidence);
  const double reduction =
      100.0 * (1.0 - static_cast<double>(n) / static_cast<double>(model.design_count));
  std::cout << "mode: " << pme::to_string(model.mode) << "\n"
            << "samples: " << set.filter_report.retained << " retained of "
            << set.filter_report.input << "\n"
            << "rank: " << model.rank() << "\n"
            << "N: " << n << " (confidence " << confidence << ")\n"
            << "dimensionality reduction: " << reduction << "%\n";
  for (const auto& warning : model.provenance.warnings)
    std::cerr << "warning: " << warning << "\n";
  return 0;
}

int run_report(const std::string& model_path, const std::string& what,
               const std::string& out_path) {
  const auto model = pme::io::load_model(model_path);
  auto out = open_out(out_path);
  const auto r = model.rank();

  if (what == "variance") {
    out << "mode,eigenvalue,cumulative_fraction\n";
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) {
      cumulative += model.eigenvalues[k];
      out << (k + 1) << "," << pme::io::format_double(model.eigenvalues[k]) << ","
          << pme::io::format_double(cumulative / model.total_variance) << "\n";
    }
  } else if (what == "components") {
    out << "variable";
    for (Eigen::Index k = 0; k < r; ++k) out << ",m" << (k + 1);
    out << "\n";
    Eigen::MatrixXd comps(model.design_count, r);
    for (Eigen::Index k = 0; k < r; ++k) comps.col(k) = pme::normalized_components(model, k);
    for (Eigen::Index i = 0; i < model.design_count; ++i) {
      out << (i + 1);
      for (Eigen::Index k = 0; k < r; ++k) out << "," << pme::io::format_double(comps(i, k));
      out << "\n";
    }
  } else if (what == "participation") {
    out << "mode,geometry,distributed,lumped";
    for (Eigen::Index i = 0; i < model.lumped_rows; ++i) out << ",c" << (i + 1);
    out << "\n";
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto part = pme::participation(model, k);
      out << (k + 1) << "," << pme::io::format_double(part.geometry) << ","
          << pme::io::format_double(part.distributed) << ","
          << pme::io::format_double(part.lumped);
      for (Eigen::Index i = 0; i < model.lumped_rows; ++i)
        out << "," << pme::io::format_double(part.lumped_split[i]);
      out << "\n";
    }
  } else if (what == "bounds") {
    out << "mode,lower,upper\n";
    for (Eigen::Index k = 0; k < r; ++k)
      out << (k + 1) << "," << pme::io::format_double(model.lower_bounds[k]) << ","
          << pme::io::format_double(model.upper_bounds[k]) << "\n";
  } else if (what == "theta") {
    out << "sample";
    for (Eigen::Index k = 0; k < r; ++k) out << ",m" << (k + 1);
    out << "\n";
    for (Eigen::Index j = 0; j < model.theta.rows(); ++j) {
      out << j;
      for (Eigen::Index k = 0; k < r; ++k) out << "," << pme::io::format_double(model.theta(j, k));
      out << "\n";
    }
  } else {
    throw pme::ValidationError("unknown report '" + what +
                               "' (variance|components|participation|bounds|theta)");
  }
  std::cout << "wrote " << what << " report to " << out_path << "\n";
  return 0;
}

int run_reconstruct(const std::string& model_path, const std::string& x_text, bool check_bounds) {
  const auto model = pme::io::load_model(model_path);
  const auto values = parse_double_list(x_text);
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) x[static_cast<Eigen::Index>(i)] = values[i];

  if (check_bounds) {
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (x[k] < model.lower_bounds[k] || x[k] > model.upper_bounds[k])
        throw pme::ValidationError("x[" + std::to_string(k + 1) + "]=" +
                                   pme::io::format_double(x[k]) + " outside training bounds [" +
                                   pme::io::format_double(model.lower_bounds[k]) + ", " +
                                   pme::io::format_double(model.upper_bounds[k]) + "]");
  }
  const Eigen::VectorXd u = pme::backmap(model, x);
  for (Eigen::Index i = 0; i < u.size(); ++i)
    std::cout << (i ? "," : "") << pme::io::format_double(u[i]);
  std::cout << "\n";
  return 0;
}

int run_contour(const std::string& model_path, const std::string& case_path,
                const std::string& grid_text, const std::string& modes_text,
                const std::string& out_path) {
  const auto model = pme::io::load_model(model_path);
  const pme::SyntheticCase sc(pme::io::load_case(case_path));
  if (sc.design_count() != model.design_count)
    throw pme::ValidationError("case/model design dimension mismatch");

  int nx = 0, ny = 0;
  const auto cross = grid_text.find('x');
  if (cross == std::string::npos) {
    nx = ny = std::atoi(grid_text.c_str());
  } else {
    nx = std::atoi(grid_text.substr(0, cross).c_str());
    ny = std::atoi(grid_text.substr(cross + 1).c_str());
  }
  if (nx < 2 || ny < 2) throw pme::ValidationError("grid must be at least 2x2");

  const auto modes = parse_int_list(modes_text);
  if (modes.size() != 2) throw pme::ValidationError("--modes expects two 1-based indices");
  const Eigen::Index ka = modes[0] - 1, kb = modes[1] - 1;
  if (ka < 0 || kb < 0 || ka >= model.rank() || kb >= model.rank() || ka == kb)
    throw pme::ValidationError("contour mode indices out of range");

  auto out = open_out(out_path);
  out << "x" << modes[0] << ",x" << modes[1] << ",cl,cm\n";
  for (int a = 0; a < nx; ++a) {
    const double xa = model.lower_bounds[ka] +
                      (model.upper_bounds[ka] - model.lower_bounds[ka]) * a / (nx - 1.0);
    for (int b = 0; b < ny; ++b) {
      const double xb = model.lower_bounds[kb] +
                        (model.upper_bounds[kb] - model.lower_bounds[kb]) * b / (ny - 1.0);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(model.rank());
      x[ka] = xa;
      x[kb] = xb;
      const auto phys = sc.physics(pme::backmap(model, x));
      out << pme::io::format_double(xa) << "," << pme::io::format_double(xb) << ","
          << pme::io::format_double(phys.c[0]) << "," << pme::io::format_double(phys.c[1])
          << "\n";
    }
  }
  std::cout << "wrote " << nx << "x" << ny << " contour grid to " << out_path << "\n";
  return 0;
}

int run_convergence(const std::string& manifest_path, const std::string& sizes_text,
                    const std::string& mode_text, double iqr_k, const std::string& out_path) {
  pme::EmbeddingConfig config;
  config.mode = parse_mode(mode_text);
  config.iqr_k = iqr_k;

  std::vector<std::size_t> sizes;
  for (double v : parse_double_list(sizes_text)) sizes.push_back(static_cast<std::size_t>(v));

  const auto data = pme::io::load_dataset(manifest_path);
  const auto rows = pme::variance_convergence(data.samples, data.measures, config, sizes);

  auto out = open_out(out_path);
  out << "size,retained,geometric_variance,physical_variance,total_variance,"
         "rel_error_geometric,rel_error_physical,rel_error_total\n";
  for (const auto& row : rows)
    out << row.size << "," << row.retained << "," << pme::io::format_double(row.geometric) << ","
        << pme::io::format_double(row.physical) << "," << pme::io::format_double(row.total) << ","
        << pme::io::format_double(row.rel_error_geometric) << ","
        << pme::io::format_double(row.rel_error_physical) << ","
        << pme::io::format_double(row.rel_error_total) << "\n";
  std::cout << "wrote variance convergence table to " << out_path << "\n";
  return 0;
}

void emit_error(const std::string& code, const std::string& message) {
  json err;
  err["error"] = {{"code", code}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("PME_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"Parametric model embedding: weighted generalized PCA with analytical backmapping"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "Generate Sobol design samples");
  int dim = 0;
  std::size_t count = 0, skip = 0;
  std::string bounds_path, out_path;
  sample->add_option("--dim", dim, "Design dimension")->required();
  sample->add_option("--count", count, "Number of samples")->required();
  sample->add_option("--bounds", bounds_path, "CSV of per-variable lo,hi (default unit cube)");
  sample->add_option("--skip", skip, "Leading sequence points to discard");
  sample->add_option("--out", out_path, "Output design CSV")->required();

  // case
  auto* case_cmd = app.add_subcommand("case", "Describe the built-in synthetic case");
  int case_dim = 12, case_stations = 129, case_fourier = 8;
  double case_alpha = 0.05, case_width = 12.0;
  std::string case_coupled, out_bounds, out_case;
  case_cmd->add_option("--dim", case_dim, "Design dimension");
  case_cmd->add_option("--stations", case_stations, "Wrap stations");
  case_cmd->add_option("--alpha", case_alpha, "Angle of attack [rad]");
  case_cmd->add_option("--width", case_width, "Bump width exponent");
  case_cmd->add_option("--coupled", case_coupled, "Physics-coupled variable indices, 0-based");
  case_cmd->add_option("--fourier", case_fourier, "Fourier terms in the loading proxy");
  case_cmd->add_option("--out-bounds", out_bounds, "Write suggested amplitude bounds CSV");
  case_cmd->add_option("--out-case", out_case, "Write case spec JSON");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Evaluate a case over a design CSV");
  std::string sim_kind = "synthetic", samples_path, sim_out;
  int sim_stations = 129, sim_fourier = 8;
  double sim_alpha = 0.05, sim_width = 12.0;
  std::string sim_coupled;
  simulate->add_option("--case", sim_kind, "Case kind (synthetic)");
  simulate->add_option("--samples", samples_path, "Design CSV from 'sample'")->required();
  simulate->add_option("--out", sim_out, "Output dataset directory")->required();
  simulate->add_option("--stations", sim_stations, "Wrap stations");
  simulate->add_option("--alpha", sim_alpha, "Angle of attack [rad]");
  simulate->add_option("--width", sim_width, "Bump width exponent");
  simulate->add_option("--coupled", sim_coupled, "Physics-coupled variable indices, 0-based");
  simulate->add_option("--fourier", sim_fourier, "Fourier terms in the loading proxy");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit an embedding from a dataset manifest");
  std::string fit_mode, manifest_path, model_out;
  double confidence = 0.95, iqr_k = 3.0, rank_tol = 1e-12;
  fit_cmd->add_option("--mode", fit_mode, "pme | pi-pme | pd-pme")->required();
  fit_cmd->add_option("--manifest", manifest_path, "Dataset manifest JSON")->required();
  fit_cmd->add_option("--confidence", confidence, "Variance fraction to resolve");
  fit_cmd->add_option("--iqr-k", iqr_k, "Outlier screening factor");
  fit_cmd->add_option("--rank-tol", rank_tol, "Relative eigenvalue cutoff");
  fit_cmd->add_option("--out", model_out, "Output model JSON")->required();

  // report
  auto* report = app.add_subcommand("report", "Export plot-ready CSV from a model");
  std::string report_model, what, report_out;
  report->add_option("--model", report_model, "Model JSON")->required();
  report->add_option("--what", what, "variance | components | participation | bounds | theta")
      ->required();
  report->add_option("--out", report_out, "Output CSV")->required();

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "Backmap reduced coordinates to designs");
  std::string rec_model, x_text;
  bool check_bounds = false;
  reconstruct->add_option("--model", rec_model, "Model JSON")->required();
  reconstruct->add_option("--x", x_text, "Comma-separated reduced coordinates")->required();
  reconstruct->add_flag("--check-bounds", check_bounds, "Fail when x leaves the training box");

  // contour
  auto* contour = app.add_subcommand("contour", "Lumped-physics grid over two reduced variables");
  std::string con_model, con_case, grid_text = "16x16", modes_text = "1,2", con_out;
  contour->add_option("--model", con_model, "Model JSON")->required();
  contour->add_option("--case", con_case, "Case spec JSON (from simulate)")->required();
  contour->add_option("--grid", grid_text, "Grid resolution, e.g. 16 or 32x24");
  contour->add_option("--modes", modes_text, "Two 1-based mode indices");
  contour->add_option("--out", con_out, "Output CSV")->required();

  // convergence
  auto* convergence = app.add_subcommand("convergence", "Variance vs sample-count table");
  std::string conv_manifest, sizes_text, conv_mode = "pme", conv_out;
  double conv_iqr = 3.0;
  convergence->add_option("--manifest", conv_manifest, "Dataset manifest JSON")->required();
  convergence->add_option("--sizes", sizes_text, "Ascending prefix sizes, e.g. 64,128,256")
      ->required();
  convergence->add_option("--mode", conv_mode, "pme | pi-pme | pd-pme");
  convergence->add_option("--iqr-k", conv_iqr, "Outlier screening factor");
  convergence->add_option("--out", conv_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 2;
  }

  try {
    if (app.got_subcommand(sample)) return run_sample(dim, count, skip, bounds_path, out_path);
    if (app.got_subcommand(case_cmd))
      return run_case(case_config_from_flags(case_dim, case_stations, case_alpha, case_width,
                                             case_coupled, case_fourier),
                      out_bounds, out_case);
    if (app.got_subcommand(simulate))
      return run_simulate(sim_kind, samples_path, sim_out, sim_stations, sim_alpha, sim_width,
                          sim_coupled, sim_fourier);
    if (app.got_subcommand(fit_cmd))
      return run_fit(fit_mode, manifest_path, confidence, iqr_k, rank_tol, model_out);
    if (app.got_subcommand(report)) return run_report(report_model, what, report_out);
    if (app.got_subcommand(reconstruct)) return run_reconstruct(rec_model, x_text, check_bounds);
    if (app.got_subcommand(contour))
      return run_contour(con_model, con_case, grid_text, modes_text, con_out);
    if (app.got_subcommand(convergence))
      return run_convergence(conv_manifest, sizes_text, conv_mode, conv_iqr, conv_out);
  } catch (const pme::ValidationError& e) {
    emit_error("validation", e.what());
    return 2;
  } catch (const pme::NumericalError& e) {
    emit_error("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 3;
  }
  return 0;
}
