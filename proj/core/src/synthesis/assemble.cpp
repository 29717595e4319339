#include "deltaiss/synthesis/assemble.hpp"

#include "deltaiss/errors.hpp"

namespace deltaiss::synthesis {

void SynthesisConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(vartheta > 0.0)) throw ConfigError("vartheta must be positive");
  if (!(psd_floor > 0.0)) throw ConfigError("psd floor must be positive");
  if (!(verify_tol > 0.0)) throw ConfigError("verification tolerance must be positive");
}

namespace {

// Equality rows for  data * Y_a - target = 0, one scalar row per (k, c).
void add_match_rows(sdp::SdpProblem& prob, const Eigen::MatrixXd& data, int y_var,
                    int target_rows, int n, const Eigen::MatrixXd* target_coeffs,
                    int target_var, bool target_symmetric) {
  const int T = static_cast<int>(data.cols());
  for (int k = 0; k < target_rows; ++k) {
    for (int c = 0; c < n; ++c) {
      std::vector<sdp::LinearTerm> terms;
      terms.reserve(static_cast<std::size_t>(T) + 4);
      for (int t = 0; t < T; ++t) {
        const double coeff = data(k, t);
        if (coeff != 0.0) terms.push_back(sdp::LinearTerm{y_var, t * n + c, coeff});
      }
      if (target_coeffs != nullptr) {
        // target = coeffs * theta (or sigma): row k, column c picks
        // sum_j coeffs(k, j) * theta(j, c).
        for (int j = 0; j < n; ++j) {
          const double w = (*target_coeffs)(k, j);
          if (w == 0.0) continue;
          const int entry = target_symmetric ? sdp::SdpProblem::sym_entry(n, j, c) : j * n + c;
          terms.push_back(sdp::LinearTerm{target_var, entry, -w});
        }
      }
      prob.add_equality(std::move(terms), 0.0);
    }
  }
}

AssembledProgram assemble_impl(const plant::BatchPair& pair, const LiftedPair& lifted,
                               const poly::PolyMatrix& dict_factor,
                               const SynthesisConfig& cfg, bool two_map) {
  cfg.validate();
  pair.validate();
  const int n = pair.batch.state_dim();
  const int T = pair.batch.sample_count();
  const int N = cfg.dict.size();
  if (dict_factor.rows() != N || dict_factor.cols() != n)
    throw DimensionError("dictionary factor has wrong shape");
  if (lifted.primary.lifted.rows() != N || lifted.sibling.lifted.rows() != N)
    throw DimensionError("lifted data does not match the dictionary");

  if (lifted.primary.rank < N || lifted.sibling.rank < N)
    throw RichnessError("lifted data is rank-deficient (" +
                        std::to_string(lifted.primary.rank) + " and " +
                        std::to_string(lifted.sibling.rank) + " of required " +
                        std::to_string(N) + "); enrich the excitation or extend T");

  const int factor_degree = dict_factor.degree();
  const int y_degree = cfg.y_degree < 0 ? factor_degree : cfg.y_degree;
  if (y_degree < factor_degree)
    throw DegreeTooLowError("combination degree " + std::to_string(y_degree) +
                            " cannot match the dictionary factor of degree " +
                            std::to_string(factor_degree));

  AssembledProgram out;
  out.map.state_dim = n;
  out.map.sample_count = T;
  out.map.y_basis = poly::monomial_basis(n, 0, y_degree);

  // Optional equilibration: scaling a dictionary row scales the same row of
  // the factor, so the matched equalities are equivalent but better scaled.
  out.map.row_scale = Eigen::VectorXd::Ones(N);
  Eigen::MatrixXd j0 = lifted.primary.lifted;
  Eigen::MatrixXd j0_sib = lifted.sibling.lifted;
  if (cfg.row_scaling) {
    for (int k = 0; k < N; ++k) {
      const double norm = std::max(j0.row(k).cwiseAbs().maxCoeff(),
                                   j0_sib.row(k).cwiseAbs().maxCoeff());
      if (norm > 0.0) out.map.row_scale(k) = 1.0 / norm;
    }
    j0 = out.map.row_scale.asDiagonal() * j0;
    j0_sib = out.map.row_scale.asDiagonal() * j0_sib;
  }

  auto& prob = out.problem;
  out.map.theta_var = prob.declare_symmetric("theta", n);
  out.map.sigma_var = prob.declare_free("sigma", n, n);
  std::vector<int> y_vars_sibling;
  for (std::size_t a = 0; a < out.map.y_basis.size(); ++a)
    out.map.y_vars.push_back(prob.declare_free("Y" + std::to_string(a), T, n));
  if (two_map)
    for (std::size_t a = 0; a < out.map.y_basis.size(); ++a)
      y_vars_sibling.push_back(prob.declare_free("Yt" + std::to_string(a), T, n));

  const Eigen::MatrixXd identity_n = Eigen::MatrixXd::Identity(n, n);

  for (std::size_t a = 0; a < out.map.y_basis.size(); ++a) {
    const poly::Monomial& alpha = out.map.y_basis[a];
    const int y_var = out.map.y_vars[a];
    // With one feedback law the same Y coefficients must serve both
    // trajectories; the relaxation gives the sibling its own.
    const int y_var_sib = two_map ? y_vars_sibling[a] : y_var;

    Eigen::MatrixXd factor_alpha = dict_factor.coefficient(alpha);
    if (cfg.row_scaling) factor_alpha = out.map.row_scale.asDiagonal() * factor_alpha;
    add_match_rows(prob, j0, y_var, N, n, &factor_alpha, out.map.theta_var, true);
    add_match_rows(prob, j0_sib, y_var_sib, N, n, &factor_alpha, out.map.theta_var, true);

    // Derivative match: the constant basis element pins the drift matrix,
    // all other basis elements must vanish.
    if (alpha.is_constant()) {
      add_match_rows(prob, pair.batch.derivs, y_var, n, n, &identity_n,
                     out.map.sigma_var, false);
      add_match_rows(prob, pair.sibling.derivs, y_var_sib, n, n, &identity_n,
                     out.map.sigma_var, false);
    } else {
      add_match_rows(prob, pair.batch.derivs, y_var, n, n, nullptr, -1, false);
      add_match_rows(prob, pair.sibling.derivs, y_var_sib, n, n, nullptr, -1, false);
    }
  }

  // Decay condition: sigma + sigma' + vartheta * I + epsilon * theta <= 0.
  sdp::LmiBlock decay;
  decay.dim = n;
  decay.label = "decay";
  decay.constant = cfg.vartheta * identity_n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(n, n);
      coeff(i, j) += 1.0;
      coeff(j, i) += 1.0;
      decay.terms.push_back(sdp::LmiTerm{out.map.sigma_var, i * n + j, 0.5 * (coeff + coeff.transpose())});
    }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(n, n);
      coeff(i, j) += cfg.epsilon;
      coeff(j, i) += cfg.epsilon;
      if (i == j) coeff(i, i) = cfg.epsilon;
      decay.terms.push_back(
          sdp::LmiTerm{out.map.theta_var, sdp::SdpProblem::sym_entry(n, i, j), coeff});
    }
  prob.add_lmi(std::move(decay));
  prob.add_psd_floor("theta", cfg.psd_floor);
  return out;
}

}  // namespace

AssembledProgram assemble_program(const plant::BatchPair& pair, const LiftedPair& lifted,
                                  const poly::PolyMatrix& dict_factor,
                                  const SynthesisConfig& cfg) {
  return assemble_impl(pair, lifted, dict_factor, cfg, false);
}

AssembledProgram assemble_two_map_relaxation(const plant::BatchPair& pair,
                                             const LiftedPair& lifted,
                                             const poly::PolyMatrix& dict_factor,
                                             const SynthesisConfig& cfg) {
  return assemble_impl(pair, lifted, dict_factor, cfg, true);
}

}  // namespace deltaiss::synthesis
