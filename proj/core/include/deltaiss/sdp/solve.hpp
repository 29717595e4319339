#pragma once

#include <map>
#include <string>

#include "deltaiss/sdp/presolve.hpp"
#include "deltaiss/sdp/problem.hpp"

namespace deltaiss::sdp {

enum class SolveStatus { Feasible, Infeasible, NumericalFailure };

std::string status_name(SolveStatus s);

struct SolveOptions {
  double tol_feas = 1e-8;  // residual acceptance after recovery
  double tol_gap = 1e-9;   // barrier accuracy on the margin objective
  // Feasibility is solved as margin maximization: blocks <= -t * I. The cap
  // bounds t from above (any t > 0 certifies feasibility) and the trust
  // radius bounds the reduced decision variables so the barrier subproblems
  // stay bounded.
  double margin_cap = 1.0;
  double trust_radius = 1e2;
  int max_outer = 80;
  int max_newton = 100;
  double mu0 = 1.0;
  double mu_shrink = 0.2;
  PresolveOptions presolve;
};

struct SolverStats {
  int newton_iterations = 0;
  double final_mu = 0.0;
  double margin = 0.0;  // best t found; positive means strictly feasible
  double max_equality_residual = 0.0;
  double worst_block_eig = 0.0;
  std::string most_violated;
  int reduced_variables = 0;
  int free_parameters = 0;

  json to_json() const;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::map<std::string, Eigen::MatrixXd> assignment;
  SolverStats stats;

  json to_json() const;
  static SdpSolution from_json(const json& j);
};

// Eliminate-then-solve: presolve the equalities away, then run a log-det
// barrier method on  max t  s.t.  every block <= -t * I.
SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts = {});

}  // namespace deltaiss::sdp
