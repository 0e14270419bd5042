#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "pme/stats.hpp"

using namespace pme;

TEST_CASE("exact_sum is correctly rounded and order-independent") {
  const std::vector<double> cancel = {1e16, 1.0, -1e16};
  CHECK(stats::exact_sum(cancel) == 1.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> mag(-30.0, 30.0);
  std::vector<double> values(200);
  for (auto& v : values) v = std::ldexp(mag(rng), static_cast<int>(mag(rng)));

  const double reference = stats::exact_sum(values);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(values.begin(), values.end(), rng);
    CHECK(stats::exact_sum(values) == reference);
  }
}

TEST_CASE("mean and population variance") {
  const std::vector<double> xs = {1.0, 3.0};
  CHECK(stats::mean(xs) == 2.0);
  CHECK(stats::population_variance(xs) == 1.0);  // (1/2)((1-2)^2 + (3-2)^2)

  const std::vector<double> constant = {5.0, 5.0, 5.0};
  CHECK(stats::population_variance(constant) == 0.0);

  CHECK_THROWS_AS(stats::mean(std::vector<double>{}), ValidationError);
}

TEST_CASE("type-7 quantiles interpolate order statistics") {
  const std::vector<double> five = {1.0, 2.0, 3.0, 4.0, 100.0};
  CHECK(stats::quantile_type7(five, 0.25) == 2.0);
  CHECK(stats::quantile_type7(five, 0.75) == 4.0);

  const std::vector<double> eight = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
  CHECK(stats::quantile_type7(eight, 0.25) == Catch::Approx(1.75).epsilon(1e-15));
  CHECK(stats::quantile_type7(eight, 0.75) == Catch::Approx(5.25).epsilon(1e-15));

  CHECK(stats::quantile_type7(five, 0.0) == 1.0);
  CHECK(stats::quantile_type7(five, 1.0) == 100.0);
  CHECK(stats::quantile_type7(std::vector<double>{42.0}, 0.5) == 42.0);
}

TEST_CASE("iqr filter worked example rejects exactly the outlier") {
  Eigen::MatrixXd metrics(1, 5);
  metrics << 1.0, 2.0, 3.0, 4.0, 100.0;
  const auto result = stats::iqr_filter(metrics, 3.0);
  // Q1 = 2, Q3 = 4, IQR = 2, bounds [-4, 10]
  CHECK(result.keep == std::vector<char>{1, 1, 1, 1, 0});
  CHECK(result.rejected_iqr == 1);
  CHECK(result.rejected_non_finite == 0);
}

TEST_CASE("iqr filter keeps a constant metric") {
  Eigen::MatrixXd metrics(1, 4);
  metrics << 5.0, 5.0, 5.0, 5.0;
  const auto result = stats::iqr_filter(metrics, 3.0);
  CHECK(std::count(result.keep.begin(), result.keep.end(), 1) == 4);
}

TEST_CASE("iqr filter with k = 0 retains only the interquartile box") {
  Eigen::MatrixXd metrics(1, 5);
  metrics << 1.0, 2.0, 3.0, 4.0, 100.0;
  const auto result = stats::iqr_filter(metrics, 0.0);
  CHECK(result.keep == std::vector<char>{0, 1, 1, 1, 0});
}

TEST_CASE("iqr filter flags non-finite samples instead of erroring") {
  Eigen::MatrixXd metrics(1, 5);
  metrics << 1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 4.0, 3.0;
  const auto result = stats::iqr_filter(metrics, 3.0);
  CHECK(result.keep[2] == 0);
  CHECK(result.non_finite[2] == 1);
  CHECK(result.rejected_non_finite == 1);

  Eigen::MatrixXd sparse(1, 4);
  sparse << 1.0, 2.0, std::numeric_limits<double>::infinity(), 4.0;
  CHECK_THROWS_AS(stats::iqr_filter(sparse, 3.0), ValidationError);  // only 3 finite
}

TEST_CASE("iqr retention grows with k") {
  std::mt19937 rng(21);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd metrics(3, 40);
  for (Eigen::Index i = 0; i < metrics.rows(); ++i)
    for (Eigen::Index j = 0; j < metrics.cols(); ++j)
      metrics(i, j) = dist(rng) + (j % 11 == 0 ? 4.0 * dist(rng) : 0.0);

  std::vector<char> previous;
  for (double k : {0.0, 0.5, 1.0, 2.0, 3.0, 6.0}) {
    const auto result = stats::iqr_filter(metrics, k);
    if (!previous.empty()) {
      for (std::size_t j = 0; j < previous.size(); ++j)
        if (previous[j]) CHECK(result.keep[j]);  // retained sets are nested
    }
    previous = result.keep;
  }
}
