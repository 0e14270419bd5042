#pragma once

#include <cmath>
#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pme/dataset.hpp"
#include "pme/errors.hpp"
#include "pme/gpca.hpp"
#include "pme/stats.hpp"
#include "pme/types.hpp"

namespace pme {

struct EmbeddingConfig {
  Mode mode = Mode::pme;
  double confidence = 0.95;     // fraction of total variance to resolve
  double rank_tol = 1e-12;      // relative eigenvalue cutoff
  double iqr_k = 3.0;           // outlier screening factor
  // Per-element geometry weights rho; empty means 1. Accepts one value per
  // geometry row, or one per station (replicated across components).
  Eigen::VectorXd geometry_weights;
  // Explicit physics row weights replacing the inverse-variance default.
  std::optional<Eigen::VectorXd> distributed_weights;
  std::optional<Eigen::VectorXd> lumped_weights;
};

struct Provenance {
  std::size_t sample_count = 0;
  FilterReport filter_report;
  std::string config_hash;
  std::string created_at;  // informational only; never part of comparisons
  std::vector<std::string> warnings;
};

// Fitted embedding: GW-orthonormal modes partitioned into the geometry (q),
// design-variable (v), distributed-physics (phi) and lumped (pi) row blocks,
// training projections and their per-mode bounds, and everything needed to
// reproduce backmaps after a round trip through persistence.
struct EmbeddingModel {
  Mode mode = Mode::pme;
  Eigen::Index design_count = 0;
  Eigen::Index geometry_rows = 0;
  Eigen::Index distributed_rows = 0;
  Eigen::Index lumped_rows = 0;
  Eigen::Index geometry_components = 1;
  Eigen::Index stations = 0;
  double confidence = 0.95;

  Eigen::VectorXd mean_u, mean_d, mean_f, mean_c;
  Eigen::VectorXd eigenvalues;   // descending, numerical rank entries
  double total_variance = 0.0;   // trace-based: includes the discarded tail
  Eigen::MatrixXd q, v, phi, pi; // row blocks of Z*, each [block rows x r]
  Eigen::VectorXd gw;            // stacked inner-product diagonal
  Eigen::MatrixXd theta;         // training projections [S x r]
  Eigen::VectorXd lower_bounds, upper_bounds;  // per-mode min/max of theta
  std::vector<OperatingCondition> conditions;
  Provenance provenance;

  Eigen::Index rank() const { return eigenvalues.size(); }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string config_hash(const EmbeddingConfig& config) {
  std::string text = to_string(config.mode);
  auto add = [&text](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "|%.17g", v);
    text += buf;
  };
  add(config.confidence);
  add(config.rank_tol);
  add(config.iqr_k);
  for (Eigen::Index i = 0; i < config.geometry_weights.size(); ++i) add(config.geometry_weights[i]);
  text += config.distributed_weights ? "|F" : "|f";
  if (config.distributed_weights)
    for (Eigen::Index i = 0; i < config.distributed_weights->size(); ++i) add((*config.distributed_weights)[i]);
  text += config.lumped_weights ? "|C" : "|c";
  if (config.lumped_weights)
    for (Eigen::Index i = 0; i < config.lumped_weights->size(); ++i) add((*config.lumped_weights)[i]);
  char out[19];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return out;
}

inline std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

inline double centered_row_variance(const Eigen::MatrixXd& block, Eigen::Index row) {
  std::vector<double> sq(static_cast<std::size_t>(block.cols()));
  for (Eigen::Index j = 0; j < block.cols(); ++j) {
    const double v = block(row, j);
    sq[static_cast<std::size_t>(j)] = v * v;
  }
  return stats::exact_sum(sq) / static_cast<double>(block.cols());
}

}  // namespace detail

// Assembles the diagonal GW vector for the stacked snapshot matrix:
//   geometry rows   measure * rho          (rho defaults to 1)
//   variable rows   0                      (the embedding mechanism)
//   distributed     measure * 1/Var(row)   (or explicit override * measure)
//   lumped          1/Var(row)             (or explicit override)
// A zero-variance physics row gets weight 0 and a recorded warning: a
// constant row carries no variability to embed and 1/Var is singular.
inline WeightedInnerProduct build_gw(const SnapshotSet& set, const EmbeddingConfig& config,
                                     std::vector<std::string>* warnings = nullptr) {
  if (set.mode != config.mode)
    throw ValidationError("mode/block mismatch: snapshot set assembled for " + to_string(set.mode) +
                          ", config requests " + to_string(config.mode));
  const Eigen::Index d_rows = set.D.rows();
  const Eigen::Index m_rows = set.U.rows();
  const Eigen::Index f_rows = set.F.rows();
  const Eigen::Index c_rows = set.C.rows();

  Eigen::VectorXd rho = Eigen::VectorXd::Ones(d_rows);
  if (config.geometry_weights.size() > 0 && d_rows > 0) {
    if (config.geometry_weights.size() == d_rows) {
      rho = config.geometry_weights;
    } else if (set.stations > 0 && config.geometry_weights.size() == set.stations &&
               d_rows % set.stations == 0) {
      for (Eigen::Index i = 0; i < d_rows; ++i) rho[i] = config.geometry_weights[i % set.stations];
    } else {
      throw ValidationError("geometry weights length matches neither geometry rows nor stations");
    }
    if ((rho.array() < 0.0).any()) throw ValidationError("geometry weights must be non-negative");
  }
  if (config.distributed_weights && config.distributed_weights->size() != f_rows)
    throw ValidationError("distributed weight override length mismatch");
  if (config.lumped_weights && config.lumped_weights->size() != c_rows)
    throw ValidationError("lumped weight override length mismatch");

  WeightedInnerProduct weights;
  weights.gw.resize(d_rows + m_rows + f_rows + c_rows);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < d_rows; ++i, ++at)
    weights.gw[at] = set.measures.geometry[i] * rho[i];
  for (Eigen::Index i = 0; i < m_rows; ++i, ++at) weights.gw[at] = 0.0;
  for (Eigen::Index i = 0; i < f_rows; ++i, ++at) {
    const double measure = set.measures.physics.size() > 0 ? set.measures.physics[i] : 1.0;
    if (config.distributed_weights) {
      weights.gw[at] = measure * (*config.distributed_weights)[i];
    } else {
      const double var = detail::centered_row_variance(set.F, i);
      if (var > 0.0) {
        weights.gw[at] = measure / var;
      } else {
        weights.gw[at] = 0.0;
        if (warnings)
          warnings->push_back("distributed row " + std::to_string(i) +
                              " has zero variance; weight set to 0");
      }
    }
  }
  for (Eigen::Index i = 0; i < c_rows; ++i, ++at) {
    if (config.lumped_weights) {
      weights.gw[at] = (*config.lumped_weights)[i];
    } else {
      const double var = detail::centered_row_variance(set.C, i);
      if (var > 0.0) {
        weights.gw[at] = 1.0 / var;
      } else {
        weights.gw[at] = 0.0;
        if (warnings)
          warnings->push_back("lumped row " + std::to_string(i) +
                              " has zero variance; weight set to 0");
      }
    }
  }
  if ((weights.gw.array() < 0.0).any())
    throw ValidationError("negative weight in inner product");
  if ((weights.gw.array() == 0.0).all())
    throw NumericalError("degenerate inner product: all rows zero-weighted");
  return weights;
}

// Stacked snapshot matrix in fixed block order [D; U; F; C] (PD drops D).
inline Eigen::MatrixXd stack_blocks(const SnapshotSet& set) {
  const Eigen::Index S = set.sample_count();
  Eigen::MatrixXd P(set.D.rows() + set.U.rows() + set.F.rows() + set.C.rows(), S);
  Eigen::Index at = 0;
  if (set.D.rows() > 0) { P.middleRows(at, set.D.rows()) = set.D; at += set.D.rows(); }
  P.middleRows(at, set.U.rows()) = set.U; at += set.U.rows();
  if (set.F.rows() > 0) { P.middleRows(at, set.F.rows()) = set.F; at += set.F.rows(); }
  if (set.C.rows() > 0) { P.middleRows(at, set.C.rows()) = set.C; }
  return P;
}

// Fits the embedding: solves the snapshot eigenproblem on the stacked blocks,
// partitions the normalized modes, and records training projections, bounds,
// means and provenance.
inline EmbeddingModel fit(const SnapshotSet& set, const EmbeddingConfig& config) {
  std::vector<std::string> warnings;
  const WeightedInnerProduct weights = build_gw(set, config, &warnings);
  const Eigen::MatrixXd P = stack_blocks(set);
  const Spectrum spectrum = solve_snapshot(P, weights, config.rank_tol);
  const Eigen::MatrixXd theta = project(P, weights, spectrum.modes);

  EmbeddingModel model;
  model.mode = set.mode;
  model.design_count = set.U.rows();
  model.geometry_rows = set.D.rows();
  model.distributed_rows = set.F.rows();
  model.lumped_rows = set.C.rows();
  model.geometry_components = set.geometry_components;
  model.stations = set.stations;
  model.confidence = config.confidence;
  model.mean_u = set.mean_u;
  model.mean_d = set.mean_d;
  model.mean_f = set.mean_f;
  model.mean_c = set.mean_c;
  model.eigenvalues = spectrum.eigenvalues;
  model.total_variance = spectrum.total_variance;
  model.gw = weights.gw;
  model.theta = theta;
  model.conditions = set.conditions;

  const Eigen::Index r = spectrum.eigenvalues.size();
  Eigen::Index at = 0;
  model.q = spectrum.modes.middleRows(at, model.geometry_rows); at += model.geometry_rows;
  model.v = spectrum.modes.middleRows(at, model.design_count); at += model.design_count;
  model.phi = spectrum.modes.middleRows(at, model.distributed_rows); at += model.distributed_rows;
  model.pi = spectrum.modes.middleRows(at, model.lumped_rows);

  model.lower_bounds.resize(r);
  model.upper_bounds.resize(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    model.lower_bounds[k] = theta.col(k).minCoeff();
    model.upper_bounds[k] = theta.col(k).maxCoeff();
  }

  model.provenance.sample_count = static_cast<std::size_t>(set.sample_count());
  model.provenance.filter_report = set.filter_report;
  model.provenance.config_hash = detail::config_hash(config);
  model.provenance.created_at = detail::timestamp_utc();
  model.provenance.warnings = std::move(warnings);
  return model;
}

// Number of reduced variables resolving the requested variance fraction:
// the smallest N with sum_{k<=N} lambda_k >= l * total_variance. The
// comparison carries a 1e-12 relative slack so exact rational boundaries
// (e.g. cumulative 7 against 0.7 * 10) are not lost to roundoff. Capped at
// the numerical rank, since the discarded tail can never be resolved.
inline Eigen::Index truncate(const EmbeddingModel& model, double confidence) {
  if (!(confidence > 0.0 && confidence <= 1.0))
    throw ValidationError("confidence level must be in (0, 1]");
  const Eigen::Index r = model.rank();
  if (r == 0) return 0;
  const double target = confidence * model.total_variance * (1.0 - 1e-12);
  double cumulative = 0.0;
  for (Eigen::Index k = 0; k < r; ++k) {
    cumulative += model.eigenvalues[k];
    if (cumulative >= target) return k + 1;
  }
  return r;
}

// Affine backmap to the original design variables:
// u = <u> + sum_k x_k v*_k. Bounds are advisory; no clipping here.
inline Eigen::VectorXd backmap(const EmbeddingModel& model, const Eigen::VectorXd& x) {
  if (x.size() > model.rank())
    throw ValidationError("backmap: more reduced coordinates than retained modes");
  return model.mean_u + model.v.leftCols(x.size()) * x;
}

struct SampleBlocks {
  Eigen::VectorXd d;
  Eigen::VectorXd f;
  Eigen::VectorXd c;
};

// Projects one sample onto the modes: x_k = (p - <p>)^T diag(gw) z*_k.
// Only blocks with nonzero weight contribute; u is never needed.
inline Eigen::VectorXd project_sample(const EmbeddingModel& model, const SampleBlocks& blocks) {
  const Eigen::Index r = model.rank();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(r);

  Eigen::Index at = 0;
  auto accumulate = [&](const Eigen::VectorXd& provided, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& modes, Eigen::Index rows, const char* name) {
    if (rows == 0) return;
    const Eigen::VectorXd gw_block = model.gw.segment(at, rows);
    at += rows;
    if ((gw_block.array() == 0.0).all()) return;
    if (provided.size() != rows)
      throw ValidationError(std::string("project_sample: missing or mis-sized weighted block ") + name);
    const Eigen::VectorXd centered = provided - mean;
    x += modes.transpose() * (gw_block.asDiagonal() * centered);
  };

  accumulate(blocks.d, model.mean_d, model.q, model.geometry_rows, "d");
  at += model.design_count;  // u rows carry zero weight
  accumulate(blocks.f, model.mean_f, model.phi, model.distributed_rows, "f");
  accumulate(blocks.c, model.mean_c, model.pi, model.lumped_rows, "c");
  return x;
}

struct Participation {
  double geometry = 0.0;
  double distributed = 0.0;
  double lumped = 0.0;
  Eigen::VectorXd lumped_split;  // per lumped scalar
};

// GW-energy split of mode k across the weighted blocks. The fractions sum
// to 1 by the unit GW-norm of the modes.
inline Participation participation(const EmbeddingModel& model, Eigen::Index k) {
  if (k < 0 || k >= model.rank()) throw ValidationError("participation: mode index out of range");
  Participation part;
  Eigen::Index at = 0;
  if (model.geometry_rows > 0) {
    const auto gw_block = model.gw.segment(at, model.geometry_rows);
    part.geometry = model.q.col(k).dot(gw_block.asDiagonal() * model.q.col(k));
  }
  at += model.geometry_rows + model.design_count;
  if (model.distributed_rows > 0) {
    const auto gw_block = model.gw.segment(at, model.distributed_rows);
    part.distributed = model.phi.col(k).dot(gw_block.asDiagonal() * model.phi.col(k));
  }
  at += model.distributed_rows;
  part.lumped_split = Eigen::VectorXd::Zero(model.lumped_rows);
  for (Eigen::Index i = 0; i < model.lumped_rows; ++i) {
    part.lumped_split[i] = model.gw[at + i] * model.pi(i, k) * model.pi(i, k);
    part.lumped += part.lumped_split[i];
  }
  return part;
}

// |v_k| / max_i |v_ik|: which design variables dominate mode k.
// A zero v_k yields all zeros with the degenerate flag set.
inline Eigen::VectorXd normalized_components(const EmbeddingModel& model, Eigen::Index k,
                                             bool* degenerate = nullptr) {
  if (k < 0 || k >= model.rank()) throw ValidationError("normalized_components: mode index out of range");
  const Eigen::VectorXd magnitudes = model.v.col(k).cwiseAbs();
  const double peak = magnitudes.maxCoeff();
  if (degenerate) *degenerate = (peak == 0.0);
  if (peak == 0.0) return Eigen::VectorXd::Zero(model.design_count);
  return magnitudes / peak;
}

struct VarianceConvergenceRow {
  std::size_t size = 0;      // requested prefix length
  std::size_t retained = 0;  // samples surviving the filters
  double geometric = 0.0;
  double physical = 0.0;
  double total = 0.0;
  double rel_error_geometric = 0.0;  // vs the largest size
  double rel_error_physical = 0.0;
  double rel_error_total = 0.0;
};

// Variance budget (trace split by block) over prefix-nested subsets of the
// raw sample list; the relative-error columns compare against the largest
// size. Reveals how many samples the variance estimate needs to saturate.
inline std::vector<VarianceConvergenceRow> variance_convergence(
    const std::vector<RawSample>& raw, const ElementMeasures& measures,
    const EmbeddingConfig& config, const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw ValidationError("variance_convergence: empty size list");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw ValidationError("variance_convergence: sizes must be at least 2");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw ValidationError("variance_convergence: sizes must be strictly ascending");
  }
  if (sizes.back() > raw.size())
    throw ValidationError("variance_convergence: size exceeds available samples");

  std::vector<VarianceConvergenceRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t size : sizes) {
    const std::vector<RawSample> prefix(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(size));
    const SnapshotSet set = assemble(prefix, measures, config.mode, config.iqr_k);
    const WeightedInnerProduct weights = build_gw(set, config);

    VarianceConvergenceRow row;
    row.size = size;
    row.retained = set.filter_report.retained;
    Eigen::Index at = 0;
    auto block_trace = [&](const Eigen::MatrixXd& block) {
      std::vector<double> contributions;
      contributions.reserve(static_cast<std::size_t>(block.rows()));
      for (Eigen::Index i = 0; i < block.rows(); ++i, ++at)
        if (weights.gw[at] != 0.0)
          contributions.push_back(weights.gw[at] * detail::centered_row_variance(block, i));
      return stats::exact_sum(contributions);
    };
    row.geometric = block_trace(set.D);
    at += set.U.rows();
    const double f_trace = block_trace(set.F);
    const double c_trace = block_trace(set.C);
    row.physical = f_trace + c_trace;
    row.total = row.geometric + row.physical;
    rows.push_back(row);
  }

  const auto& reference = rows.back();
  auto rel = [](double v, double ref) { return ref != 0.0 ? std::abs(v - ref) / std::abs(ref) : 0.0; };
  for (auto& row : rows) {
    row.rel_error_geometric = rel(row.geometric, reference.geometric);
    row.rel_error_physical = rel(row.physical, reference.physical);
    row.rel_error_total = rel(row.total, reference.total);
  }
  return rows;
}

}  // namespace pme
