#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "deltaiss/plant/poly_system.hpp"
#include "deltaiss/plant/simulate.hpp"
#include "deltaiss/synthesis/certificate.hpp"

namespace deltaiss::verify {

// One closed-loop trajectory pair under the certified feedback law.
struct PairTrace {
  std::uint64_t id = 0;
  Eigen::VectorXd times;
  Eigen::MatrixXd x;             // n x K
  Eigen::MatrixXd x_tilde;       // n x K
  Eigen::MatrixXd u_hat;         // m x K, realized external input
  Eigen::MatrixXd u_hat_tilde;   // m x K
  Eigen::VectorXd lyapunov;      // V(x, x~) along the trace
  Eigen::VectorXd diff_norm;     // |x - x~|
  Eigen::VectorXd lie_estimate;  // centered-difference dV/dt

  int samples() const { return static_cast<int>(times.size()); }
  bool inputs_identical(double tol = 0.0) const;
};

// Integrates both closed loops xdot = A F(x) + B (K(x) x + u_hat) on a shared
// time grid and records the Lyapunov series.
PairTrace simulate_closed_loop_pair(const plant::PolySystem& sys,
                                    const synthesis::Certificate& cert,
                                    const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& x0_tilde,
                                    const plant::InputSignal& u_hat,
                                    const plant::InputSignal& u_hat_tilde, double horizon,
                                    double step, std::uint64_t id = 0);

}  // namespace deltaiss::verify
