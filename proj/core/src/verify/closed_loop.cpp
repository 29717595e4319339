#include "deltaiss/verify/closed_loop.hpp"

#include "deltaiss/errors.hpp"
#include "deltaiss/synthesis/synthesize.hpp"

namespace deltaiss::verify {

bool PairTrace::inputs_identical(double tol) const {
  return (u_hat - u_hat_tilde).cwiseAbs().maxCoeff() <= tol;
}

PairTrace simulate_closed_loop_pair(const plant::PolySystem& sys,
                                    const synthesis::Certificate& cert,
                                    const Eigen::VectorXd& x0,
                                    const Eigen::VectorXd& x0_tilde,
                                    const plant::InputSignal& u_hat,
                                    const plant::InputSignal& u_hat_tilde, double horizon,
                                    double step, std::uint64_t id) {
  const int n = sys.state_dim();
  if (x0.size() != n || x0_tilde.size() != n)
    throw DimensionError("initial condition dimension mismatch");
  if (cert.K.cols() != n) throw DimensionError("certificate state dimension mismatch");
  if (cert.K.rows() != sys.input_dim())
    throw DimensionError("certificate input dimension mismatch");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");

  // Joint integration keeps both trajectories on one time grid.
  plant::VectorField field = [&](double t, const Eigen::VectorXd& z) {
    const Eigen::VectorXd xa = z.head(n);
    const Eigen::VectorXd xb = z.tail(n);
    Eigen::VectorXd out(2 * n);
    out.head(n) = sys.field(xa, synthesis::controller_evaluate(cert, xa, u_hat(t)));
    out.tail(n) = sys.field(xb, synthesis::controller_evaluate(cert, xb, u_hat_tilde(t)));
    return out;
  };

  Eigen::VectorXd z0(2 * n);
  z0 << x0, x0_tilde;
  PairTrace trace;
  trace.id = id;
  const Eigen::MatrixXd joint = plant::integrate_rk4(field, z0, horizon, step, &trace.times);
  const int K = static_cast<int>(trace.times.size());

  trace.x = joint.topRows(n);
  trace.x_tilde = joint.bottomRows(n);
  trace.u_hat.resize(sys.input_dim(), K);
  trace.u_hat_tilde.resize(sys.input_dim(), K);
  trace.lyapunov.resize(K);
  trace.diff_norm.resize(K);
  for (int k = 0; k < K; ++k) {
    trace.u_hat.col(k) = u_hat(trace.times(k));
    trace.u_hat_tilde.col(k) = u_hat_tilde(trace.times(k));
    const Eigen::VectorXd d = trace.x.col(k) - trace.x_tilde.col(k);
    trace.lyapunov(k) = d.dot(cert.P * d);
    trace.diff_norm(k) = d.norm();
  }

  trace.lie_estimate.resize(K);
  if (K >= 2) {
    const double h = trace.times(1) - trace.times(0);
    for (int k = 1; k + 1 < K; ++k)
      trace.lie_estimate(k) = (trace.lyapunov(k + 1) - trace.lyapunov(k - 1)) / (2.0 * h);
    trace.lie_estimate(0) = (trace.lyapunov(1) - trace.lyapunov(0)) / h;
    trace.lie_estimate(K - 1) = (trace.lyapunov(K - 1) - trace.lyapunov(K - 2)) / h;
  } else {
    trace.lie_estimate.setZero();
  }
  return trace;
}

}  // namespace deltaiss::verify
