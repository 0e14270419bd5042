#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pme {

enum class Mode { pme, pi_pme, pd_pme };

inline std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::pme: return "pme";
    case Mode::pi_pme: return "pi-pme";
    case Mode::pd_pme: return "pd-pme";
  }
  return "pme";
}

inline bool mode_uses_geometry(Mode mode) { return mode != Mode::pd_pme; }
inline bool mode_uses_physics(Mode mode) { return mode != Mode::pme; }

// One design evaluation. Vectors of size 0 mean "block absent".
//   u : design variables (length M, always required)
//   d : geometry displacements at the n*L surface stations
//   f : distributed physics, operating conditions concatenated row-wise
//   c : lumped physics scalars
struct RawSample {
  std::string id;
  Eigen::VectorXd u;
  Eigen::VectorXd d;
  Eigen::VectorXd f;
  Eigen::VectorXd c;
  bool feasible = true;
};

// Element measures for the diagonal G: geometry entries per geometry row,
// physics entries per distributed-physics row (empty means unit measures).
struct ElementMeasures {
  Eigen::VectorXd geometry;
  Eigen::VectorXd physics;
};

struct FilterReport {
  std::size_t input = 0;
  std::size_t infeasible = 0;
  std::size_t non_finite = 0;
  std::size_t iqr = 0;
  std::size_t retained = 0;
};

// Layout of the F block: row count per operating condition, in stacking order.
struct OperatingCondition {
  std::string name;
  Eigen::Index rows = 0;
};

// Centered snapshot blocks, one column per retained sample. Which blocks are
// populated follows the mode: D for geometry modes, F/C for physics modes,
// U always. Row means are stored for backmapping and reconstruction.
struct SnapshotSet {
  Mode mode = Mode::pme;
  Eigen::MatrixXd D;
  Eigen::MatrixXd U;
  Eigen::MatrixXd F;
  Eigen::MatrixXd C;
  Eigen::VectorXd mean_d;
  Eigen::VectorXd mean_u;
  Eigen::VectorXd mean_f;
  Eigen::VectorXd mean_c;
  ElementMeasures measures;
  FilterReport filter_report;
  std::vector<std::string> ids;
  std::vector<OperatingCondition> conditions;
  Eigen::Index geometry_components = 1;  // n
  Eigen::Index stations = 0;             // L

  Eigen::Index sample_count() const { return U.cols(); }
};

}  // namespace pme
