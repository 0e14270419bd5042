#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pme/types.hpp"

namespace test_support {

// Independent oracle for the weighted eigenproblem: eigenvalues of the
// row-dimension operator (1/S) P P^T diag(gw), computed by the general dense
// eigensolver. Deliberately avoids the snapshot path under test.
inline std::vector<double> brute_force_weighted_eigenvalues(const Eigen::MatrixXd& P,
                                                            const Eigen::VectorXd& gw) {
  const Eigen::MatrixXd op =
      (P * P.transpose()) * gw.asDiagonal() / static_cast<double>(P.cols());
  Eigen::EigenSolver<Eigen::MatrixXd> solver(op);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(op.rows()));
  for (Eigen::Index i = 0; i < op.rows(); ++i)
    values.push_back(solver.eigenvalues()[i].real());
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, Eigen::Index rows, Eigen::Index cols,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, Eigen::Index size, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = dist(rng);
  return v;
}

inline void center_rows_inplace(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i).array() -= m.row(i).mean();
}

// Raw samples over random designs: u block plus an arbitrary linear geometry
// map, handy for dataset and embedding tests that do not need the surrogate.
inline std::vector<pme::RawSample> linear_geometry_samples(std::mt19937& rng, Eigen::Index m_vars,
                                                           Eigen::Index d_rows, Eigen::Index count) {
  const Eigen::MatrixXd map = random_matrix(rng, d_rows, m_vars);
  std::vector<pme::RawSample> samples;
  for (Eigen::Index j = 0; j < count; ++j) {
    pme::RawSample s;
    s.id = "t" + std::to_string(j);
    s.u = random_vector(rng, m_vars);
    s.d = map * s.u;
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace test_support
