#pragma once

#include "deltaiss/synthesis/assemble.hpp"
#include "deltaiss/synthesis/certificate.hpp"

namespace deltaiss::synthesis {

// Recomputes every synthesis-condition residual for (theta, sigma, Y) against
// the raw pair, independent of how the candidate was produced.
ConditionReport condition_residuals(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& P,
                                    const Eigen::MatrixXd& sigma, const poly::PolyMatrix& Y,
                                    const plant::BatchPair& pair,
                                    const poly::MonomialDictionary& dict, double epsilon,
                                    double vartheta, double psd_floor, double tol);

// Full pipeline: lift, richness check, factorize, assemble, eliminate, solve,
// verify, extract. Refuses to return a certificate whose independent residual
// check fails.
Certificate synthesize(const plant::BatchPair& pair, const SynthesisConfig& cfg);

// Feedback law evaluation u = K(x) x + u_hat.
Eigen::VectorXd controller_evaluate(const Certificate& cert, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u_hat);

// Research diagnostic for the one-vs-two combination-map question: margins of
// the committed single-map program and of the relaxation that gives each
// trajectory its own map. The relaxation is never certified.
struct TwoMapDiagnostic {
  double single_map_margin = 0.0;
  double two_map_margin = 0.0;
  bool single_feasible = false;
  bool two_map_feasible = false;
};
TwoMapDiagnostic diagnose_two_map_relaxation(const plant::BatchPair& pair,
                                             const SynthesisConfig& cfg);

}  // namespace deltaiss::synthesis
