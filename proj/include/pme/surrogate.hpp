#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pme/errors.hpp"
#include "pme/types.hpp"

namespace pme {

// Deterministic desk-scale test case: a 2-D profile discretized by L stations
// wrapping trailing edge -> upper surface -> leading edge -> lower surface ->
// trailing edge, deformed by Hicks-Henne bumps b(xi) = sin(pi * xi^p)^width
// with p = log(1/2)/log(center), each bump acting on one surface. Physics is
// thin-airfoil theory on the camber line built from the coupled subset of
// bumps: Fourier coefficients by trapezoid quadrature on the cosine grid,
// lift and quarter-chord moment as lumped outputs, and a chordwise vortex
// loading proxy gamma(theta)*sin(theta) as the distributed output.
//
// Design variables outside `coupled` move the geometry but leave the physics
// bit-identical, so the geometry/physics correlation of the case is tunable.
class SyntheticCase {
 public:
  struct Config {
    int design_count = 12;          // M bump amplitudes
    int stations = 129;             // L wrap stations
    double alpha = 0.05;            // angle of attack, radians
    double bump_width = 12.0;       // sin exponent; larger = narrower bumps
    std::vector<int> coupled = {0, 1, 2};  // variables that drive the physics
    int fourier_terms = 8;
  };

  explicit SyntheticCase(Config config) : cfg_(std::move(config)) {
    if (cfg_.design_count < 1) throw ValidationError("synthetic case: need at least 1 design variable");
    if (cfg_.stations < 9) throw ValidationError("synthetic case: need at least 9 stations");
    if (cfg_.bump_width < 2.0) throw ValidationError("synthetic case: bump width below 2");
    if (cfg_.fourier_terms < 1) throw ValidationError("synthetic case: need at least 1 Fourier term");
    for (int k : cfg_.coupled)
      if (k < 0 || k >= cfg_.design_count)
        throw ValidationError("synthetic case: coupled index out of range");

    build_grid();
    build_bumps();
    for (int k : cfg_.coupled) {
      // Camber slope must stay bounded at the leading edge for the quadrature.
      const double p = exponents_[static_cast<std::size_t>(k)];
      if (cfg_.bump_width * p <= 1.0)
        throw ValidationError("synthetic case: coupled bump too close to the leading edge");
    }
  }

  static SyntheticCase standard(int design_count = 12) {
    Config cfg;
    cfg.design_count = design_count;
    if (design_count < 3) cfg.coupled = {0};
    return SyntheticCase(cfg);
  }

  const Config& config() const { return cfg_; }
  int design_count() const { return cfg_.design_count; }
  int stations() const { return cfg_.stations; }
  int lumped_count() const { return 2; }

  // Continuous bump function of variable i at chordwise position xi in [0,1].
  double bump_value(int i, double xi) const {
    const double p = exponents_[static_cast<std::size_t>(i)];
    if (xi <= 0.0 || xi >= 1.0) return 0.0;
    return std::pow(std::sin(std::numbers::pi * std::pow(xi, p)), cfg_.bump_width);
  }

  double bump_center(int i) const { return centers_[static_cast<std::size_t>(i)]; }

  // Surface displacement at the L wrap stations; linear in u, zero at the
  // trailing-edge endpoints.
  Eigen::VectorXd geometry(const Eigen::VectorXd& u) const {
    require_design(u);
    return bump_matrix_.transpose() * u;
  }

  struct PhysicsResult {
    Eigen::VectorXd f;  // loading proxy at the L wrap stations
    Eigen::VectorXd c;  // [c_L, c_M]
  };

  PhysicsResult physics(const Eigen::VectorXd& u) const {
    require_design(u);
    const int nf = cfg_.fourier_terms;

    // Camber slope dy/dxi at the chordwise quadrature stations, coupled
    // bumps only.
    Eigen::VectorXd slope = Eigen::VectorXd::Zero(quad_theta_.size());
    for (int k : cfg_.coupled)
      slope += u[k] * bump_slopes_.row(k).transpose();

    const double a0 =
        cfg_.alpha - slope.dot(quad_weights_) / std::numbers::pi;
    Eigen::VectorXd an(nf);
    for (int n = 1; n <= nf; ++n) {
      const Eigen::VectorXd cosn = (static_cast<double>(n) * quad_theta_).array().cos();
      an[n - 1] = (2.0 / std::numbers::pi) *
                  (slope.array() * cosn.array() * quad_weights_.array()).sum();
    }

    PhysicsResult out;
    out.c.resize(2);
    out.c[0] = 2.0 * std::numbers::pi * (a0 + an[0] / 2.0);
    out.c[1] = -(std::numbers::pi / 4.0) * (an[0] - an[1]);

    // gamma(theta) * sin(theta) = 2 [ A0 (1 + cos th) + sin th * sum An sin(n th) ]
    // evaluated at every wrap station's chordwise angle; finite everywhere.
    out.f.resize(station_theta_.size());
    for (Eigen::Index j = 0; j < station_theta_.size(); ++j) {
      const double th = station_theta_[j];
      double series = 0.0;
      for (int n = 1; n <= nf; ++n) series += an[n - 1] * std::sin(n * th);
      out.f[j] = 2.0 * (a0 * (1.0 + std::cos(th)) + std::sin(th) * series);
    }
    return out;
  }

  // Trapezoid measure |d xi| along the wrap; strictly positive.
  const Eigen::VectorXd& geometry_measures() const { return measures_; }
  const Eigen::VectorXd& physics_measures() const { return measures_; }

  // Per-variable amplitude a_i with equal displacement energy
  // a_i^2 * int b_i^2 dG = const, so the sampled geometric variance spreads
  // evenly across the bumps. Suggested sampling box is [-a_i, a_i].
  Eigen::VectorXd amplitude_bounds() const {
    Eigen::VectorXd amps(cfg_.design_count);
    for (int i = 0; i < cfg_.design_count; ++i) {
      const double energy =
          (bump_matrix_.row(i).transpose().array().square() * measures_.array()).sum();
      amps[i] = 0.05 / std::sqrt(energy);
    }
    return amps;
  }

  // Designs (columns of U) evaluated into assemble()-ready samples.
  std::vector<RawSample> evaluate_batch(const Eigen::MatrixXd& designs,
                                        bool with_geometry = true,
                                        bool with_distributed = true,
                                        bool with_lumped = true) const {
    std::vector<RawSample> samples;
    samples.reserve(static_cast<std::size_t>(designs.cols()));
    for (Eigen::Index j = 0; j < designs.cols(); ++j) {
      RawSample s;
      s.id = "s" + std::to_string(j);
      s.u = designs.col(j);
      if (with_geometry) s.d = geometry(s.u);
      if (with_distributed || with_lumped) {
        auto phys = physics(s.u);
        if (with_distributed) s.f = std::move(phys.f);
        if (with_lumped) s.c = std::move(phys.c);
      }
      samples.push_back(std::move(s));
    }
    return samples;
  }

 private:
  void require_design(const Eigen::VectorXd& u) const {
    if (u.size() != cfg_.design_count)
      throw ValidationError("synthetic case: design vector length mismatch");
  }

  static std::vector<double> spread_centers(int count) {
    std::vector<double> centers(static_cast<std::size_t>(count));
    if (count == 1) {
      centers[0] = 0.5;
      return centers;
    }
    for (int i = 0; i < count; ++i)
      centers[static_cast<std::size_t>(i)] =
          0.08 + (0.92 - 0.08) * static_cast<double>(i) / static_cast<double>(count - 1);
    return centers;
  }

  void build_grid() {
    const int L = cfg_.stations;
    station_xi_.resize(L);
    station_theta_.resize(L);
    station_upper_.assign(static_cast<std::size_t>(L), false);
    for (int j = 0; j < L; ++j) {
      const double s = 2.0 * std::numbers::pi * j / static_cast<double>(L - 1);
      const double xi = (1.0 + std::cos(s)) / 2.0;
      station_xi_[j] = xi;
      station_theta_[j] = std::acos(std::clamp(2.0 * xi - 1.0, -1.0, 1.0));
      station_upper_[static_cast<std::size_t>(j)] = s <= std::numbers::pi + 1e-14;
    }
    measures_.resize(L);
    measures_[0] = std::abs(station_xi_[1] - station_xi_[0]) / 2.0;
    measures_[L - 1] = std::abs(station_xi_[L - 1] - station_xi_[L - 2]) / 2.0;
    for (int j = 1; j < L - 1; ++j)
      measures_[j] = (std::abs(station_xi_[j + 1] - station_xi_[j]) +
                      std::abs(station_xi_[j] - station_xi_[j - 1])) / 2.0;

    // Chordwise quadrature grid: uniform in theta over half the wrap.
    const int lq = L / 2 + 1;
    quad_theta_.resize(lq);
    quad_weights_.resize(lq);
    const double dth = std::numbers::pi / static_cast<double>(lq - 1);
    for (int k = 0; k < lq; ++k) {
      quad_theta_[k] = dth * k;
      quad_weights_[k] = (k == 0 || k == lq - 1) ? dth / 2.0 : dth;
    }
  }

  void build_bumps() {
    const int M = cfg_.design_count;
    const int upper_count = (M + 1) / 2;
    const auto upper_centers = spread_centers(upper_count);
    const auto lower_centers = spread_centers(M - upper_count);

    centers_.reserve(static_cast<std::size_t>(M));
    surface_upper_.reserve(static_cast<std::size_t>(M));
    for (int i = 0; i < upper_count; ++i) {
      centers_.push_back(upper_centers[static_cast<std::size_t>(i)]);
      surface_upper_.push_back(true);
    }
    for (int i = 0; i < M - upper_count; ++i) {
      centers_.push_back(lower_centers[static_cast<std::size_t>(i)]);
      surface_upper_.push_back(false);
    }
    exponents_.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
      const double t = centers_[static_cast<std::size_t>(i)];
      if (!(t > 0.0 && t < 1.0)) throw ValidationError("synthetic case: bump center outside (0, 1)");
      exponents_[static_cast<std::size_t>(i)] = std::log(0.5) / std::log(t);
    }

    bump_matrix_.setZero(M, cfg_.stations);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < cfg_.stations; ++j)
        if (station_upper_[static_cast<std::size_t>(j)] == surface_upper_[static_cast<std::size_t>(i)])
          bump_matrix_(i, j) = bump_value(i, station_xi_[j]);

    bump_slopes_.setZero(M, quad_theta_.size());
    for (int i = 0; i < M; ++i)
      for (Eigen::Index k = 0; k < quad_theta_.size(); ++k) {
        const double xi = (1.0 - std::cos(quad_theta_[k])) / 2.0;
        bump_slopes_(i, k) = bump_slope(i, xi);
      }
  }

  // d b_i / d xi; zero at both chord ends whenever width * p > 1.
  double bump_slope(int i, double xi) const {
    if (xi <= 0.0 || xi >= 1.0) return 0.0;
    const double p = exponents_[static_cast<std::size_t>(i)];
    const double w = cfg_.bump_width;
    const double z = std::pow(xi, p);
    const double s = std::sin(std::numbers::pi * z);
    return w * std::pow(s, w - 1.0) * std::cos(std::numbers::pi * z) *
           std::numbers::pi * p * std::pow(xi, p - 1.0);
  }

  Config cfg_;
  Eigen::VectorXd station_xi_;
  Eigen::VectorXd station_theta_;
  std::vector<bool> station_upper_;
  Eigen::VectorXd measures_;
  Eigen::VectorXd quad_theta_;
  Eigen::VectorXd quad_weights_;
  std::vector<double> centers_;
  std::vector<bool> surface_upper_;
  std::vector<double> exponents_;
  Eigen::MatrixXd bump_matrix_;   // M x L
  Eigen::MatrixXd bump_slopes_;   // M x quadrature points
};

}  // namespace pme
