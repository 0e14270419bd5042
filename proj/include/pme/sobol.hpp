#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pme/errors.hpp"
#include "pme/sobol_directions.hpp"

namespace pme {

// Gray-code Sobol sequence generator on [0,1)^d using the Joe-Kuo direction
// numbers. Deterministic: the same (dimension, index) always yields the same
// point, on every platform, because the state is pure integer arithmetic.
class SobolSequence {
 public:
  static constexpr int kBits = 31;
  static constexpr int kMaxDimension = detail::kSobolTableDimensions;

  explicit SobolSequence(int dimension) : dimension_(dimension) {
    if (dimension < 1)
      throw ValidationError("sobol dimension must be at least 1");
    if (dimension > kMaxDimension)
      throw ValidationError("sobol dimension " + std::to_string(dimension) +
                            " exceeds the direction-number table (max supported dimension is " +
                            std::to_string(kMaxDimension) + ")");
    directions_.resize(static_cast<std::size_t>(dimension));
    for (int d = 0; d < dimension; ++d) init_dimension(d);
    state_.assign(static_cast<std::size_t>(dimension), 0);
  }

  // Next point of the sequence. The first call returns the origin.
  Eigen::VectorXd next() {
    Eigen::VectorXd point(dimension_);
    if (index_ > 0) {
      // Rightmost zero bit of (index - 1), 1-based: the Gray-code step.
      std::uint64_t v = index_ - 1;
      int c = 1;
      while (v & 1u) {
        v >>= 1;
        ++c;
      }
      for (int d = 0; d < dimension_; ++d)
        state_[static_cast<std::size_t>(d)] ^= directions_[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
    }
    constexpr double scale = 1.0 / static_cast<double>(std::uint64_t{1} << kBits);
    for (int d = 0; d < dimension_; ++d)
      point[d] = static_cast<double>(state_[static_cast<std::size_t>(d)]) * scale;
    ++index_;
    return point;
  }

  void skip(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) next();
  }

 private:
  void init_dimension(int d) {
    auto& dir = directions_[static_cast<std::size_t>(d)];
    dir.assign(kBits + 1, 0);
    if (d == 0) {
      for (int k = 1; k <= kBits; ++k)
        dir[static_cast<std::size_t>(k)] = std::uint32_t{1} << (kBits - k);
      return;
    }
    const auto& row = detail::kSobolDirections[static_cast<std::size_t>(d - 1)];
    const int s = row.degree;
    for (int k = 1; k <= s && k <= kBits; ++k)
      dir[static_cast<std::size_t>(k)] = row.m[static_cast<std::size_t>(k - 1)] << (kBits - k);
    for (int k = s + 1; k <= kBits; ++k) {
      std::uint32_t value = dir[static_cast<std::size_t>(k - s)] ^ (dir[static_cast<std::size_t>(k - s)] >> s);
      for (int i = 1; i < s; ++i)
        if ((row.coeffs >> (s - 1 - i)) & 1u) value ^= dir[static_cast<std::size_t>(k - i)];
      dir[static_cast<std::size_t>(k)] = value;
    }
  }

  int dimension_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;
  std::vector<std::vector<std::uint32_t>> directions_;
};

// `count` Sobol points mapped affinely into per-variable bounds, the first
// `skip` points of the sequence discarded. Columns are points.
inline Eigen::MatrixXd sobol_sample(const std::vector<std::pair<double, double>>& bounds,
                                    std::size_t count, std::size_t skip = 0) {
  if (bounds.empty()) throw ValidationError("sobol_sample: empty bounds");
  if (count < 1) throw ValidationError("sobol_sample: count must be at least 1");
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw ValidationError("sobol_sample: each bound must satisfy lo < hi");

  const int dim = static_cast<int>(bounds.size());
  SobolSequence seq(dim);
  seq.skip(skip);

  Eigen::MatrixXd points(dim, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    const Eigen::VectorXd unit = seq.next();
    for (int i = 0; i < dim; ++i) {
      const auto& [lo, hi] = bounds[static_cast<std::size_t>(i)];
      points(i, static_cast<Eigen::Index>(j)) = lo + unit[i] * (hi - lo);
    }
  }
  return points;
}

}  // namespace pme
