#include "deltaiss/verify/recheck.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "deltaiss/synthesis/synthesize.hpp"

namespace deltaiss::verify {

json RecheckReport::to_json() const {
  return json{{"fresh", fresh.to_json()},
              {"fingerprint_match", fingerprint_match},
              {"alpha_lower_delta", alpha_lower_delta},
              {"alpha_upper_delta", alpha_upper_delta},
              {"controller_consistency", controller_consistency},
              {"stored_vs_fresh_drift", stored_vs_fresh_drift},
              {"pass", pass}};
}

RecheckReport recheck_certificate(const synthesis::Certificate& cert,
                                  const plant::BatchPair& pair,
                                  const poly::MonomialDictionary& dict) {
  RecheckReport report;
  report.fingerprint_match = cert.data_fingerprint == pair.fingerprint();

  report.fresh = synthesis::condition_residuals(
      cert.theta, cert.P, cert.sigma, cert.Y, pair, dict, cert.epsilon, cert.vartheta,
      cert.psd_floor, cert.residual_report.tol > 0.0 ? cert.residual_report.tol : 1e-6);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cert.P + cert.P.transpose()),
                                                    Eigen::EigenvaluesOnly);
  report.alpha_lower_delta = std::abs(es.eigenvalues().minCoeff() - cert.alpha_lower);
  report.alpha_upper_delta = std::abs(es.eigenvalues().maxCoeff() - cert.alpha_upper);

  const auto& stored = cert.residual_report;
  double drift = 0.0;
  drift = std::max(drift, std::abs(stored.match_primary - report.fresh.match_primary));
  drift = std::max(drift, std::abs(stored.match_sibling - report.fresh.match_sibling));
  drift = std::max(drift, std::abs(stored.drift_primary - report.fresh.drift_primary));
  drift = std::max(drift, std::abs(stored.drift_sibling - report.fresh.drift_sibling));
  drift = std::max(drift, std::abs(stored.decay_lambda_max - report.fresh.decay_lambda_max));
  drift = std::max(drift,
                   std::abs(stored.theta_floor_lambda_min - report.fresh.theta_floor_lambda_min));
  report.stored_vs_fresh_drift = drift;

  const int n = pair.batch.state_dim();
  report.controller_consistency = poly_residual(
      poly_multiply(poly_multiply(poly::PolyMatrix::constant(pair.batch.inputs, n), cert.Y),
                    poly::PolyMatrix::constant(cert.P, n)),
      cert.K);

  const double eig_tol = 1e-6 * std::max(1.0, cert.alpha_upper);
  report.pass = report.fresh.pass && report.alpha_lower_delta <= eig_tol &&
                report.alpha_upper_delta <= eig_tol &&
                report.controller_consistency <= report.fresh.tol;
  return report;
}

}  // namespace deltaiss::verify
