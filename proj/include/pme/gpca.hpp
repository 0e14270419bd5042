#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "pme/errors.hpp"
#include "pme/stats.hpp"

namespace pme {

// Diagonal of the GW inner product: element measures times user weights,
// one entry per row of the snapshot matrix. Zero entries are the embedding
// mechanism: a zero-weight row contributes nothing to the spectrum yet its
// eigenvector components are still carried along.
struct WeightedInnerProduct {
  Eigen::VectorXd gw;
};

// Eigenpairs of the weighted covariance operator, GW-orthonormal modes.
//   eigenvalues     descending, numerical rank r entries
//   modes           [total rows x r], unit GW-norm columns
//   total_variance  trace((1/S) P^T GW P): the full variance budget,
//                   including any numerical tail discarded by the rank cut
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd modes;
  double total_variance = 0.0;
};

namespace detail {

inline double trace_weighted_variance(const Eigen::MatrixXd& P, const Eigen::VectorXd& gw) {
  const auto S = static_cast<double>(P.cols());
  std::vector<double> sq(static_cast<std::size_t>(P.cols()));
  std::vector<double> contributions;
  contributions.reserve(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (gw[i] == 0.0) continue;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      const double v = P(i, j);
      sq[static_cast<std::size_t>(j)] = v * v;
    }
    contributions.push_back(gw[i] * (stats::exact_sum(sq) / S));
  }
  return stats::exact_sum(contributions);
}

}  // namespace detail

// Solves A G W z = lambda z with A = (1/S) P P^T and diagonal GW, through the
// algebraically equivalent S x S problem B = (1/S) P^T diag(gw) P: for every
// eigenpair (lambda, y) of B with lambda > 0, z = P y satisfies the original
// problem. Much cheaper than the row-dimension problem whenever S << rows.
//
// Modes are rescaled to unit GW-norm. Sign convention: the entry of largest
// magnitude among weighted rows is made positive, ties broken by lowest row
// index. Equal eigenvalues keep the underlying solver's ascending index order.
inline Spectrum solve_snapshot(const Eigen::MatrixXd& P, const WeightedInnerProduct& weights,
                               double rank_tol = 1e-12) {
  const Eigen::Index rows = P.rows();
  const Eigen::Index S = P.cols();
  if (weights.gw.size() != rows)
    throw ValidationError("solve_snapshot: gw length does not match snapshot rows");
  if (S < 2) throw ValidationError("solve_snapshot: need at least 2 samples");
  if (!P.allFinite()) throw ValidationError("solve_snapshot: non-finite snapshot matrix");
  if ((weights.gw.array() < 0.0).any())
    throw ValidationError("solve_snapshot: negative weight");
  if ((weights.gw.array() == 0.0).all())
    throw NumericalError("degenerate inner product: all weights are zero");

  const Eigen::MatrixXd weighted = weights.gw.asDiagonal() * P;
  Eigen::MatrixXd gram = (P.transpose() * weighted) / static_cast<double>(S);
  gram = ((gram + gram.transpose()) / 2.0).eval();  // suppress roundoff asymmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NumericalError("snapshot eigensolve failed to converge");
  const Eigen::VectorXd& values = solver.eigenvalues();   // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(S));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });

  const double lambda_max = values[order.front()];
  const Eigen::Index weighted_rows = (weights.gw.array() > 0.0).count();
  const Eigen::Index max_rank = std::min(S, weighted_rows);

  std::vector<Eigen::Index> kept;
  for (Eigen::Index k : order) {
    if (static_cast<Eigen::Index>(kept.size()) >= max_rank) break;
    if (values[k] > rank_tol * lambda_max && values[k] > 0.0) kept.push_back(k);
  }

  Spectrum spectrum;
  spectrum.total_variance = detail::trace_weighted_variance(P, weights.gw);
  const auto r = static_cast<Eigen::Index>(kept.size());
  spectrum.eigenvalues.resize(r);
  spectrum.modes.resize(rows, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    spectrum.eigenvalues[k] = values[kept[static_cast<std::size_t>(k)]];
    Eigen::VectorXd z = P * vectors.col(kept[static_cast<std::size_t>(k)]);
    const double gamma = std::sqrt(z.dot(weights.gw.asDiagonal() * z));
    if (!(gamma > 0.0))
      throw NumericalError("mode with vanishing GW norm escaped the rank cut");
    z /= gamma;

    Eigen::Index pivot = -1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (weights.gw[i] <= 0.0) continue;
      if (std::abs(z[i]) > best) {
        best = std::abs(z[i]);
        pivot = i;
      }
    }
    if (pivot >= 0 && z[pivot] < 0.0) z = -z;
    spectrum.modes.col(k) = z;
  }
  return spectrum;
}

// Projection coefficients of the snapshot columns onto the normalized modes:
// Theta = P^T diag(gw) Z*, one row per sample, one column per mode.
inline Eigen::MatrixXd project(const Eigen::MatrixXd& P, const WeightedInnerProduct& weights,
                               const Eigen::MatrixXd& modes) {
  if (weights.gw.size() != P.rows() || modes.rows() != P.rows())
    throw ValidationError("project: dimension mismatch");
  return P.transpose() * (weights.gw.asDiagonal() * modes);
}

}  // namespace pme
