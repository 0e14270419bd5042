#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pme/errors.hpp"
#include "pme/stats.hpp"
#include "pme/types.hpp"

namespace pme {

namespace detail {

// Subtract the correctly rounded mean from every row; returns the means.
inline Eigen::VectorXd center_rows(Eigen::MatrixXd& block) {
  Eigen::VectorXd means(block.rows());
  std::vector<double> row(static_cast<std::size_t>(block.cols()));
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = 0; j < block.cols(); ++j)
      row[static_cast<std::size_t>(j)] = block(i, j);
    const double m = stats::mean(row);
    means[i] = m;
    block.row(i).array() -= m;
  }
  return means;
}

inline bool sample_finite(const RawSample& s) {
  return s.u.allFinite() && s.d.allFinite() && s.f.allFinite() && s.c.allFinite();
}

}  // namespace detail

// Builds a centered SnapshotSet from raw evaluations:
//   1. drop samples flagged infeasible, and samples with any NaN/Inf entry;
//   2. IQR-screen the physics rows (F and C together) at factor iqr_k,
//      quartiles taken once over the post-feasibility population;
//   3. center every retained block row.
// Sample order is preserved. Only the blocks the mode uses are ingested.
inline SnapshotSet assemble(const std::vector<RawSample>& raw,
                            const ElementMeasures& measures, Mode mode,
                            double iqr_k = 3.0,
                            std::vector<OperatingCondition> conditions = {},
                            Eigen::Index geometry_components = 1,
                            Eigen::Index stations = 0) {
  if (raw.empty()) throw ValidationError("assemble: no samples");

  const Eigen::Index m_vars = raw.front().u.size();
  const Eigen::Index d_rows = raw.front().d.size();
  const Eigen::Index f_rows = raw.front().f.size();
  const Eigen::Index c_rows = raw.front().c.size();
  if (m_vars == 0) throw ValidationError("assemble: samples carry no design variables");
  for (const auto& s : raw)
    if (s.u.size() != m_vars || s.d.size() != d_rows || s.f.size() != f_rows ||
        s.c.size() != c_rows)
      throw ValidationError("assemble: inconsistent block sizes across samples (sample " + s.id + ")");

  const bool want_geometry = mode_uses_geometry(mode);
  const bool want_physics = mode_uses_physics(mode);
  if (want_geometry && d_rows == 0)
    throw ValidationError("mode/block mismatch: " + to_string(mode) + " requires a geometry block");
  if (want_physics && f_rows == 0 && c_rows == 0)
    throw ValidationError("mode/block mismatch: " + to_string(mode) + " requires a physics block (F and/or C)");
  if (want_geometry) {
    if (measures.geometry.size() != d_rows)
      throw ValidationError("assemble: geometry measures length does not match geometry rows");
    if (!(measures.geometry.array() > 0.0).all())
      throw ValidationError("assemble: element measures must be strictly positive");
  }
  if (want_physics && f_rows > 0 && measures.physics.size() != 0) {
    if (measures.physics.size() != f_rows)
      throw ValidationError("assemble: physics measures length does not match distributed rows");
    if (!(measures.physics.array() > 0.0).all())
      throw ValidationError("assemble: element measures must be strictly positive");
  }

  FilterReport report;
  report.input = raw.size();

  // Feasibility and finiteness pass.
  std::vector<std::size_t> candidates;
  candidates.reserve(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (!detail::sample_finite(raw[j])) {
      ++report.non_finite;
      continue;
    }
    if (!raw[j].feasible) {
      ++report.infeasible;
      continue;
    }
    candidates.push_back(j);
  }

  // Outlier screening on physics rows.
  std::vector<std::size_t> retained;
  if (want_physics && (f_rows + c_rows) > 0 && !candidates.empty()) {
    Eigen::MatrixXd metrics(f_rows + c_rows, static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t jj = 0; jj < candidates.size(); ++jj) {
      const auto& s = raw[candidates[jj]];
      if (f_rows > 0) metrics.block(0, static_cast<Eigen::Index>(jj), f_rows, 1) = s.f;
      if (c_rows > 0) metrics.block(f_rows, static_cast<Eigen::Index>(jj), c_rows, 1) = s.c;
    }
    const auto iqr = stats::iqr_filter(metrics, iqr_k);
    for (std::size_t jj = 0; jj < candidates.size(); ++jj)
      if (iqr.keep[jj]) retained.push_back(candidates[jj]);
    report.iqr = iqr.rejected_iqr + iqr.rejected_non_finite;
  } else {
    retained = candidates;
  }
  report.retained = retained.size();
  if (retained.size() < 2)
    throw ValidationError("insufficient samples: fewer than 2 survive filtering");

  const auto S = static_cast<Eigen::Index>(retained.size());
  SnapshotSet set;
  set.mode = mode;
  set.filter_report = report;
  set.conditions = std::move(conditions);
  set.geometry_components = geometry_components;
  set.stations = stations > 0 ? stations
                              : (want_geometry && geometry_components > 0
                                     ? d_rows / geometry_components
                                     : 0);
  set.ids.reserve(retained.size());

  set.U.resize(m_vars, S);
  if (want_geometry) set.D.resize(d_rows, S);
  if (want_physics && f_rows > 0) set.F.resize(f_rows, S);
  if (want_physics && c_rows > 0) set.C.resize(c_rows, S);
  for (Eigen::Index jj = 0; jj < S; ++jj) {
    const auto& s = raw[retained[static_cast<std::size_t>(jj)]];
    set.ids.push_back(s.id);
    set.U.col(jj) = s.u;
    if (want_geometry) set.D.col(jj) = s.d;
    if (want_physics && f_rows > 0) set.F.col(jj) = s.f;
    if (want_physics && c_rows > 0) set.C.col(jj) = s.c;
  }

  set.mean_u = detail::center_rows(set.U);
  if (set.D.size() > 0) set.mean_d = detail::center_rows(set.D);
  if (set.F.size() > 0) set.mean_f = detail::center_rows(set.F);
  if (set.C.size() > 0) set.mean_c = detail::center_rows(set.C);

  if (want_geometry) set.measures.geometry = measures.geometry;
  if (want_physics && f_rows > 0) {
    set.measures.physics = measures.physics.size() > 0
                               ? measures.physics
                               : Eigen::VectorXd::Ones(f_rows);
  }
  return set;
}

}  // namespace pme
