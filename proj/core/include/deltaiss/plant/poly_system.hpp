#pragma once

#include <Eigen/Dense>

#include "deltaiss/poly/dictionary.hpp"

namespace deltaiss::plant {

// Ground-truth plant xdot = A * F(x) + B * u over its true dictionary.
// Used by the simulator and the demo only; synthesis never sees it.
class PolySystem {
 public:
  PolySystem(Eigen::MatrixXd sys_matrix, Eigen::MatrixXd input_matrix,
             poly::MonomialDictionary true_dict);

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  const Eigen::MatrixXd& sys_matrix() const { return A_; }
  const Eigen::MatrixXd& input_matrix() const { return B_; }
  const poly::MonomialDictionary& true_dict() const { return dict_; }

  Eigen::VectorXd field(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  json to_json() const;
  static PolySystem from_json(const json& j);

 private:
  Eigen::MatrixXd A_, B_;
  poly::MonomialDictionary dict_;
  int n_, m_;
};

// Rotating rigid spacecraft demo plant: angular velocities about the
// principal axes with inertias (200, 200, 300) and per-axis torque inputs.
PolySystem spacecraft_system();

}  // namespace deltaiss::plant
