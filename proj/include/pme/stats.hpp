#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pme/errors.hpp"

namespace pme::stats {

// Correctly rounded sum of doubles (Shewchuk expansion accumulation, same
// scheme as Python's math.fsum). The result is the true sum rounded once,
// so it does not depend on the order of the inputs. Row means, variances
// and traces built on top of it are permutation-invariant, which the
// dataset contracts rely on.
inline double exact_sum(std::span<const double> xs) {
  std::vector<double> partials;
  partials.reserve(8);
  for (double x : xs) {
    std::size_t used = 0;
    for (std::size_t j = 0; j < partials.size(); ++j) {
      double y = partials[j];
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }

  double hi = 0.0;
  auto n = partials.size();
  if (n > 0) {
    hi = partials[--n];
    // Fold lower partials in; track the first nonzero remainder for the
    // round-half-to-even correction.
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) ||
                  (lo > 0.0 && partials[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
  }
  return hi;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean of empty range");
  return exact_sum(xs) / static_cast<double>(xs.size());
}

// Population variance (1/S normalization) about the correctly rounded mean.
inline double population_variance(std::span<const double> xs) {
  const double m = mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - m;
    sq[i] = d * d;
  }
  return exact_sum(sq) / static_cast<double>(xs.size());
}

// Quantile by linear interpolation between order statistics
// (Hyndman-Fan type 7, the numpy/R default). p in [0, 1].
inline double quantile_type7(std::span<const double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of empty range");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile level outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct IqrFilterResult {
  std::vector<char> keep;        // per sample
  std::vector<char> non_finite;  // per sample: rejected because of a NaN/Inf metric
  std::size_t rejected_iqr = 0;
  std::size_t rejected_non_finite = 0;
};

// Interquartile-range screening over a metrics matrix [n_metrics x S].
// A sample survives iff every metric value lies in [Q1 - k*IQR, Q3 + k*IQR],
// quartiles taken over the finite values of that metric row. Samples with a
// non-finite metric are rejected with their own cause instead of erroring.
inline IqrFilterResult iqr_filter(const Eigen::MatrixXd& metrics, double k = 3.0) {
  if (!(k >= 0.0)) throw ValidationError("iqr filter factor must be non-negative");
  const auto n_metrics = metrics.rows();
  const auto n_samples = metrics.cols();

  IqrFilterResult result;
  result.keep.assign(static_cast<std::size_t>(n_samples), 1);
  result.non_finite.assign(static_cast<std::size_t>(n_samples), 0);

  for (Eigen::Index j = 0; j < n_samples; ++j) {
    if (!metrics.col(j).allFinite()) {
      result.keep[static_cast<std::size_t>(j)] = 0;
      result.non_finite[static_cast<std::size_t>(j)] = 1;
      ++result.rejected_non_finite;
    }
  }

  for (Eigen::Index i = 0; i < n_metrics; ++i) {
    std::vector<double> finite;
    finite.reserve(static_cast<std::size_t>(n_samples));
    for (Eigen::Index j = 0; j < n_samples; ++j) {
      const double v = metrics(i, j);
      if (std::isfinite(v)) finite.push_back(v);
    }
    if (finite.size() < 4)
      throw ValidationError("iqr filter needs at least 4 finite values per metric");
    const double q1 = quantile_type7(finite, 0.25);
    const double q3 = quantile_type7(finite, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - k * iqr;
    const double hi = q3 + k * iqr;
    for (Eigen::Index j = 0; j < n_samples; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (!result.keep[sj] || result.non_finite[sj]) continue;
      const double v = metrics(i, j);
      if (v < lo || v > hi) result.keep[sj] = 0;
    }
  }

  for (std::size_t j = 0; j < result.keep.size(); ++j)
    if (!result.keep[j] && !result.non_finite[j]) ++result.rejected_iqr;
  return result;
}

}  // namespace pme::stats
