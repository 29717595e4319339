#pragma once

#include <Eigen/Dense>

#include "deltaiss/plant/excitation.hpp"
#include "deltaiss/plant/poly_system.hpp"

namespace deltaiss::plant {

// Dense fixed-step trajectory. Column k of `states` is x(times[k]);
// `derivs` holds the exact vector field evaluated at the stored states.
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;
  Eigen::MatrixXd derivs;
  Eigen::MatrixXd inputs;

  int samples() const { return static_cast<int>(times.size()); }
};

// Classical fixed-step RK4 over [0, horizon]. The step is snapped to an
// integer subdivision of the horizon. Throws NonfiniteStateError with the
// time of the first nonfinite value if the trajectory blows up.
Trajectory simulate(const PolySystem& sys, const InputSignal& input,
                    const Eigen::VectorXd& x0, double horizon, double step);

// Same integrator for a generic vector field (used for closed-loop runs).
using VectorField = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
Eigen::MatrixXd integrate_rk4(const VectorField& field, const Eigen::VectorXd& x0,
                              double horizon, double step, Eigen::VectorXd* times_out);

}  // namespace deltaiss::plant
