#include "deltaiss/synthesis/synthesize.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "deltaiss/errors.hpp"
#include "deltaiss/poly/factorize.hpp"
#include "deltaiss/sdp/check.hpp"

namespace deltaiss::synthesis {

namespace {

constexpr const char* kSolverVersion = "deltaiss-barrier/0.1.0";

double sym_lambda_max(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double sym_lambda_min(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

poly::PolyMatrix rebuild_combiner(const AssemblyMap& map,
                                  const std::map<std::string, Eigen::MatrixXd>& assignment,
                                  const std::string& prefix) {
  poly::PolyMatrix y(map.sample_count, map.state_dim, map.state_dim);
  for (std::size_t a = 0; a < map.y_basis.size(); ++a)
    y.add_term(map.y_basis[a], assignment.at(prefix + std::to_string(a)));
  return y;
}

}  // namespace

ConditionReport condition_residuals(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& P,
                                    const Eigen::MatrixXd& sigma, const poly::PolyMatrix& Y,
                                    const plant::BatchPair& pair,
                                    const poly::MonomialDictionary& dict, double epsilon,
                                    double vartheta, double psd_floor, double tol) {
  const int n = pair.batch.state_dim();
  ConditionReport report;
  report.tol = tol;
  report.psd_floor = psd_floor;

  const poly::PolyMatrix factor = poly::factorize_dictionary(dict);
  const poly::PolyMatrix factor_theta =
      poly_multiply(factor, poly::PolyMatrix::constant(theta, n));

  const plant::LiftedData lifted_primary = plant::lift(pair.batch, dict);
  const plant::LiftedData lifted_sibling = plant::lift(pair.sibling, dict);
  report.match_primary = poly_residual(
      poly_multiply(poly::PolyMatrix::constant(lifted_primary.lifted, n), Y), factor_theta);
  report.match_sibling = poly_residual(
      poly_multiply(poly::PolyMatrix::constant(lifted_sibling.lifted, n), Y), factor_theta);

  const poly::PolyMatrix sigma_const = poly::PolyMatrix::constant(sigma, n);
  report.drift_primary = poly_residual(
      poly_multiply(poly::PolyMatrix::constant(pair.batch.derivs, n), Y), sigma_const);
  report.drift_sibling = poly_residual(
      poly_multiply(poly::PolyMatrix::constant(pair.sibling.derivs, n), Y), sigma_const);

  const Eigen::MatrixXd decay = sigma + sigma.transpose() +
                                vartheta * Eigen::MatrixXd::Identity(n, n) + epsilon * theta;
  report.decay_lambda_max = sym_lambda_max(decay);
  report.theta_floor_lambda_min = sym_lambda_min(theta);
  report.metric_identity = (P * theta - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();

  report.pass = report.match_primary <= tol && report.match_sibling <= tol &&
                report.drift_primary <= tol && report.drift_sibling <= tol &&
                report.decay_lambda_max <= tol &&
                report.theta_floor_lambda_min >= psd_floor - tol &&
                report.metric_identity <= tol;
  return report;
}

namespace {

Certificate synthesize_once(const plant::BatchPair& pair, const SynthesisConfig& cfg) {
  cfg.validate();
  pair.validate();
  const int n = pair.batch.state_dim();

  LiftedPair lifted{plant::lift(pair.batch, cfg.dict, cfg.rank),
                    plant::lift(pair.sibling, cfg.dict, cfg.rank)};
  const plant::RichnessReport richness = plant::richness_check(pair, cfg.dict, cfg.rank);
  if (!richness.rank_ok)
    throw RichnessError("data richness check failed: lifted ranks " +
                        std::to_string(richness.rank_primary) + " and " +
                        std::to_string(richness.rank_sibling) + " of required " +
                        std::to_string(richness.required_rank));

  const poly::PolyMatrix factor = poly::factorize_dictionary(cfg.dict);
  AssembledProgram assembled = assemble_program(pair, lifted, factor, cfg);

  const sdp::SdpSolution solution = sdp::solve(assembled.problem, cfg.solver);
  if (solution.status == sdp::SolveStatus::Infeasible)
    throw InfeasibleError("synthesis program is infeasible: achieved margin " +
                              std::to_string(solution.stats.margin) +
                              ", most violated block '" + solution.stats.most_violated + "'",
                          solution.stats.margin, solution.stats.most_violated);
  if (solution.status == sdp::SolveStatus::NumericalFailure)
    throw NumericalFailureError(
        "solver did not reach a verified point (margin " +
        std::to_string(solution.stats.margin) + ", max equality residual " +
        std::to_string(solution.stats.max_equality_residual) + ")");

  // Kernel-level verification of the returned point on the declared program.
  const sdp::ResidualReport kernel_report =
      sdp::check_solution(assembled.problem, solution.assignment, cfg.verify_tol);
  if (!kernel_report.pass)
    throw VerificationFailedError(
        "solver claimed feasibility but the independent kernel check failed (max equality "
        "residual " +
        std::to_string(kernel_report.max_equality_residual) + ")");

  Certificate cert;
  cert.theta = solution.assignment.at("theta");
  cert.sigma = solution.assignment.at("sigma");
  cert.Y = rebuild_combiner(assembled.map, solution.assignment, "Y");

  // The program is homogeneous in (theta, sigma, Y) and the feedback law is
  // invariant under joint scaling, so normalize toward trace(theta) = n.
  // Scaling down is limited by the decay margin and the floor; scaling never
  // leaves here unverified, so a bad choice would only surface as a revert.
  {
    const double decay_margin =
        -sym_lambda_max(cert.sigma + cert.sigma.transpose() +
                        cfg.vartheta * Eigen::MatrixXd::Identity(n, n) +
                        cfg.epsilon * cert.theta);
    const double theta_min = sym_lambda_min(cert.theta);
    if (decay_margin > 0.0 && theta_min > 0.0) {
      const double s_target = static_cast<double>(n) / cert.theta.trace();
      const double s_floor = 2.0 * cfg.psd_floor / theta_min;
      const double s_decay = 1.05 * cfg.vartheta / (cfg.vartheta + decay_margin);
      const double s = std::min(1e4, std::max({s_target, s_floor, s_decay}));
      const ConditionReport scaled_check = condition_residuals(
          s * cert.theta, Eigen::MatrixXd((1.0 / s) * cert.theta.inverse()), s * cert.sigma,
          cert.Y * s, pair, cfg.dict, cfg.epsilon, cfg.vartheta, cfg.psd_floor,
          cfg.verify_tol);
      if (scaled_check.pass) {
        cert.theta *= s;
        cert.sigma *= s;
        cert.Y = cert.Y * s;
      }
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cert.theta);
  if (llt.info() != Eigen::Success)
    throw VerificationFailedError("inverse metric is not positive definite");
  Eigen::MatrixXd p = llt.solve(Eigen::MatrixXd::Identity(n, n));
  cert.P = 0.5 * (p + p.transpose());
  cert.K = poly_multiply(
      poly_multiply(poly::PolyMatrix::constant(pair.batch.inputs, n), cert.Y),
      poly::PolyMatrix::constant(cert.P, n));
  cert.dict = cfg.dict;
  cert.epsilon = cfg.epsilon;
  cert.vartheta = cfg.vartheta;
  cert.psd_floor = cfg.psd_floor;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.P, Eigen::EigenvaluesOnly);
  cert.alpha_lower = es.eigenvalues().minCoeff();
  cert.alpha_upper = es.eigenvalues().maxCoeff();
  if (cfg.input_matrix_norm_bound.has_value())
    cert.rho_bound = (*cfg.input_matrix_norm_bound) * (*cfg.input_matrix_norm_bound) /
                     cfg.vartheta;
  cert.data_fingerprint = pair.fingerprint();
  cert.solver_version = kSolverVersion;
  cert.solver_margin = solution.stats.margin;
  cert.row_scale = assembled.map.row_scale;

  // Raw-data verification; a certificate never leaves here unverified.
  cert.residual_report =
      condition_residuals(cert.theta, cert.P, cert.sigma, cert.Y, pair, cfg.dict, cfg.epsilon,
                          cfg.vartheta, cfg.psd_floor, cfg.verify_tol);
  if (!cert.residual_report.pass)
    throw VerificationFailedError(
        "synthesized candidate failed the raw-data residual check (decay lambda_max " +
        std::to_string(cert.residual_report.decay_lambda_max) + ")");
  return cert;
}

}  // namespace

Certificate synthesize(const plant::BatchPair& pair, const SynthesisConfig& cfg) {
  if (!cfg.auto_retry) return synthesize_once(pair, cfg);

  const double eps_scales[] = {1.0, 0.5, 0.25, 0.1};
  const double vth_scales[] = {1.0, 0.5, 2.0};
  std::string attempts;
  for (double vs : vth_scales) {
    for (double es : eps_scales) {
      SynthesisConfig attempt = cfg;
      attempt.epsilon = cfg.epsilon * es;
      attempt.vartheta = cfg.vartheta * vs;
      try {
        return synthesize_once(pair, attempt);
      } catch (const InfeasibleError& e) {
        attempts += " (epsilon " + std::to_string(attempt.epsilon) + ", vartheta " +
                    std::to_string(attempt.vartheta) + ": margin " +
                    std::to_string(e.margin) + ")";
      }
    }
  }
  throw InfeasibleError("synthesis infeasible over the retry grid:" + attempts, 0.0, "decay");
}

Eigen::VectorXd controller_evaluate(const Certificate& cert, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u_hat) {
  if (x.size() != cert.K.cols()) throw DimensionError("state dimension mismatch");
  if (u_hat.size() != cert.K.rows()) throw DimensionError("input dimension mismatch");
  return cert.K.evaluate(x) * x + u_hat;
}

TwoMapDiagnostic diagnose_two_map_relaxation(const plant::BatchPair& pair,
                                             const SynthesisConfig& cfg) {
  TwoMapDiagnostic diag;
  LiftedPair lifted{plant::lift(pair.batch, cfg.dict, cfg.rank),
                    plant::lift(pair.sibling, cfg.dict, cfg.rank)};
  const poly::PolyMatrix factor = poly::factorize_dictionary(cfg.dict);

  {
    AssembledProgram single = assemble_program(pair, lifted, factor, cfg);
    const auto solution = sdp::solve(single.problem, cfg.solver);
    diag.single_map_margin = solution.stats.margin;
    diag.single_feasible = solution.status == sdp::SolveStatus::Feasible;
  }
  {
    AssembledProgram relaxed = assemble_two_map_relaxation(pair, lifted, factor, cfg);
    const auto solution = sdp::solve(relaxed.problem, cfg.solver);
    diag.two_map_margin = solution.stats.margin;
    diag.two_map_feasible = solution.status == sdp::SolveStatus::Feasible;
  }
  return diag;
}

}  // namespace deltaiss::synthesis
