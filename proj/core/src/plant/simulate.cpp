#include "deltaiss/plant/simulate.hpp"

#include <cmath>

#include "deltaiss/errors.hpp"

namespace deltaiss::plant {

Eigen::MatrixXd integrate_rk4(const VectorField& field, const Eigen::VectorXd& x0,
                              double horizon, double step, Eigen::VectorXd* times_out) {
  if (!(step > 0.0)) throw ConfigError("integration step must be positive");
  if (!(horizon >= step)) throw ConfigError("horizon must be at least one step");
  const auto steps = static_cast<Eigen::Index>(std::llround(horizon / step));
  const double h = horizon / static_cast<double>(steps);

  const auto n = x0.size();
  Eigen::MatrixXd states(n, steps + 1);
  Eigen::VectorXd times(steps + 1);
  states.col(0) = x0;
  times(0) = 0.0;

  Eigen::VectorXd x = x0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const Eigen::VectorXd k1 = field(t, x);
    const Eigen::VectorXd k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = field(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw NonfiniteStateError("state became nonfinite at t=" + std::to_string(t + h),
                                t + h);
    states.col(k + 1) = x;
    times(k + 1) = static_cast<double>(k + 1) * h;
  }
  if (times_out != nullptr) *times_out = times;
  return states;
}

Trajectory simulate(const PolySystem& sys, const InputSignal& input,
                    const Eigen::VectorXd& x0, double horizon, double step) {
  if (x0.size() != sys.state_dim()) throw DimensionError("initial state dimension mismatch");
  VectorField field = [&sys, &input](double t, const Eigen::VectorXd& x) {
    return sys.field(x, input(t));
  };
  Trajectory traj;
  traj.states = integrate_rk4(field, x0, horizon, step, &traj.times);
  const int samples = traj.samples();
  traj.inputs.resize(sys.input_dim(), samples);
  traj.derivs.resize(sys.state_dim(), samples);
  for (int k = 0; k < samples; ++k) {
    traj.inputs.col(k) = input(traj.times(k));
    traj.derivs.col(k) = sys.field(traj.states.col(k), traj.inputs.col(k));
  }
  return traj;
}

}  // namespace deltaiss::plant
