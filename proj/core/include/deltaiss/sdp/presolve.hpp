#pragma once

#include <Eigen/Dense>
#include <memory>

#include "deltaiss/sdp/problem.hpp"

namespace deltaiss::sdp {

struct PresolveOptions {
  // Rank threshold for the elimination decompositions: singular values above
  // max(rows, cols) * eps * sigma_max count; a non-negative value replaces
  // that with an absolute threshold.
  double rank_tol = -1.0;
  // Max allowed residual of the least-squares particular solution before the
  // equality system is declared inconsistent.
  double consistency_tol = 1e-9;
  // Induced constraints whose coefficients fall below this fraction of their
  // component's coupling scale are treated as numerically zero. Dropping is
  // safe: an over-drop is caught by the post-solve residual verification,
  // while keeping noise rows would wrongly pin the visible variables.
  double compat_drop_tol = 1e-8;
};

// Result of eliminating the equality constraints.
//
// Scalars that appear in some LMI block or PSD floor form the "visible" set;
// everything else is eliminated blockwise: equality rows touching only
// invisible unknowns are grouped into connected components, each solved by a
// rank-revealing decomposition, and the rank-deficiency directions turn into
// induced linear constraints on the visible set. The reduced problem is an
// SdpProblem over a single free vector that parametrizes exactly the
// achievable visible values; `recover` maps any reduced point back to a full
// assignment (minimum-norm on the eliminated unknowns).
class SdpReduction {
 public:
  const SdpProblem& reduced_problem() const { return reduced_; }

  // Dimension of the reduced decision vector (0 when the LMIs are constant).
  int reduced_variable_count() const { return reduced_vars_; }

  // Dimension of the full affine solution family of the equality system,
  // i.e. total unknowns minus the equality-system rank.
  int free_parameter_count() const { return free_parameters_; }
  int equality_rank() const { return equality_rank_; }

  // Full flat assignment for a reduced decision vector.
  Eigen::VectorXd recover_flat(const Eigen::VectorXd& v) const;
  std::map<std::string, Eigen::MatrixXd> recover(const Eigen::VectorXd& v) const;

 private:
  friend SdpReduction presolve_eliminate(const SdpProblem&, const PresolveOptions&);

  struct Decomposition {
    Eigen::MatrixXd u, vmat;
    Eigen::VectorXd sv;
    int rank = 0;
    Eigen::VectorXd minnorm_solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd left_null() const;
  };

  struct Component {
    std::vector<int> qvars;   // flat indices of eliminated scalars
    Eigen::MatrixXd visible;  // rows x |S| coupling to the visible scalars
    Eigen::VectorXd rhs;
    std::shared_ptr<const Decomposition> dec;
  };

  SdpProblem original_;
  SdpProblem reduced_;
  std::vector<int> visible_;    // sorted flat indices of the visible set
  Eigen::VectorXd visible_particular_;
  Eigen::MatrixXd visible_null_;  // |S| x r
  std::vector<Component> components_;
  int reduced_vars_ = 0;
  int free_parameters_ = 0;
  int equality_rank_ = 0;
};

// Throws InconsistentEqualitiesError when the equality system has no
// solution; rank-deficiency is handled by parametrization, never by failing.
SdpReduction presolve_eliminate(const SdpProblem& problem, const PresolveOptions& opts = {});

}  // namespace deltaiss::sdp
