#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "pme/sobol.hpp"

using namespace pme;

namespace {
const std::vector<std::pair<double, double>> unit(std::size_t dim) {
  return std::vector<std::pair<double, double>>(dim, {0.0, 1.0});
}
}  // namespace

TEST_CASE("sobol one-dimensional prefix") {
  const Eigen::MatrixXd pts = sobol_sample(unit(1), 4);
  CHECK(pts(0, 0) == 0.0);
  CHECK(pts(0, 1) == 0.5);
  CHECK(pts(0, 2) == 0.75);
  CHECK(pts(0, 3) == 0.25);
}

TEST_CASE("sobol two-dimensional prefix") {
  const Eigen::MatrixXd pts = sobol_sample(unit(2), 2);
  CHECK(pts.col(0).isZero(0.0));
  CHECK(pts(0, 1) == 0.5);
  CHECK(pts(1, 1) == 0.5);
}

TEST_CASE("sobol matches the reference generator deeper into the sequence") {
  // Frozen from an independent Joe-Kuo implementation (scipy.stats.qmc.Sobol).
  const Eigen::MatrixXd p6 = sobol_sample(unit(6), 8);
  const double expected6[6] = {0.125, 0.625, 0.375, 0.125, 0.125, 0.375};
  for (int i = 0; i < 6; ++i) CHECK(p6(i, 7) == expected6[i]);

  const Eigen::MatrixXd p12 = sobol_sample(unit(12), 14);
  const double expected12[12] = {0.8125, 0.6875, 0.8125, 0.0625, 0.4375, 0.9375,
                                 0.5625, 0.5625, 0.5625, 0.4375, 0.8125, 0.9375};
  for (int i = 0; i < 12; ++i) CHECK(p12(i, 13) == expected12[i]);
}

TEST_CASE("sobol affine mapping through custom bounds") {
  const Eigen::MatrixXd pts = sobol_sample({{-1.0, 1.0}}, 4);
  CHECK(pts(0, 0) == -1.0);
  CHECK(pts(0, 1) == 0.0);
  CHECK(pts(0, 2) == 0.5);
  CHECK(pts(0, 3) == -0.5);
}

TEST_CASE("sobol skip discards the leading points") {
  const Eigen::MatrixXd full = sobol_sample(unit(3), 8);
  const Eigen::MatrixXd tail = sobol_sample(unit(3), 4, 3);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 3; ++i) CHECK(tail(i, j) == full(i, j + 3));
}

TEST_CASE("sobol output is identical across repeated runs") {
  const Eigen::MatrixXd a = sobol_sample({{-2.0, 3.0}, {0.5, 0.75}}, 64, 16);
  const Eigen::MatrixXd b = sobol_sample({{-2.0, 3.0}, {0.5, 0.75}}, 64, 16);
  CHECK(a == b);
}

TEST_CASE("sobol rejects unsupported dimensions and bad bounds") {
  CHECK_NOTHROW(sobol_sample(unit(64), 1));
  try {
    sobol_sample(unit(65), 1);
    FAIL("expected dimension error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("64") != std::string::npos);
  }
  CHECK_THROWS_AS(sobol_sample({}, 1), ValidationError);
  CHECK_THROWS_AS(sobol_sample({{1.0, 1.0}}, 1), ValidationError);
  CHECK_THROWS_AS(sobol_sample({{2.0, 1.0}}, 1), ValidationError);
  CHECK_THROWS_AS(sobol_sample(unit(2), 0), ValidationError);
}
