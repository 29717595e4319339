#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>

#include "deltaiss/poly/poly_matrix.hpp"

namespace deltaiss::synthesis {

// Residuals of the synthesis conditions, recomputed against raw data.
struct ConditionReport {
  double match_primary = 0.0;    // lifted * Y(x) vs factor(x) * theta
  double match_sibling = 0.0;
  double drift_primary = 0.0;    // derivs * Y(x) vs the constant drift
  double drift_sibling = 0.0;
  double decay_lambda_max = 0.0; // sigma + sigma' + vartheta I + epsilon theta
  double theta_floor_lambda_min = 0.0;
  double metric_identity = 0.0;  // || P * theta - I ||_max
  double tol = 0.0;
  double psd_floor = 0.0;
  bool pass = false;

  json to_json() const;
  static ConditionReport from_json(const json& j);
};

// Quadratic incremental-stability certificate plus its feedback law
// u = K(x) x + u_hat.
struct Certificate {
  Eigen::MatrixXd theta;  // inverse metric, symmetric positive definite
  Eigen::MatrixXd P;      // metric, theta^{-1}
  Eigen::MatrixXd sigma;  // certified closed-loop drift
  poly::PolyMatrix Y;     // T x n polynomial combination of data columns
  poly::PolyMatrix K;     // m x n polynomial feedback gain
  poly::MonomialDictionary dict;
  double epsilon = 0.0;
  double vartheta = 0.0;
  double alpha_lower = 0.0;  // lambda_min(P)
  double alpha_upper = 0.0;  // lambda_max(P)
  std::optional<double> rho_bound;  // ||B||^2 / vartheta, given a user bound
  double psd_floor = 0.0;
  ConditionReport residual_report;
  std::string data_fingerprint;
  std::string solver_version;
  double solver_margin = 0.0;
  Eigen::VectorXd row_scale;

  Certificate();

  double lyapunov(const Eigen::VectorXd& x, const Eigen::VectorXd& x_tilde) const;

  json to_json() const;
  static Certificate from_json(const json& j);
  void save(const std::filesystem::path& file) const;
  static Certificate load(const std::filesystem::path& file);
};

}  // namespace deltaiss::synthesis
