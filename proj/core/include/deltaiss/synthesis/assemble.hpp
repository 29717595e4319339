#pragma once

#include <vector>

#include "deltaiss/plant/data_batch.hpp"
#include "deltaiss/plant/lift.hpp"
#include "deltaiss/poly/poly_matrix.hpp"
#include "deltaiss/sdp/problem.hpp"
#include "deltaiss/synthesis/config.hpp"

namespace deltaiss::synthesis {

// Bookkeeping needed to read the solved program back into polynomial form.
struct AssemblyMap {
  std::vector<poly::Monomial> y_basis;  // degree 0..y_degree, grlex
  int theta_var = -1;
  int sigma_var = -1;
  std::vector<int> y_vars;  // one T x n free variable per basis element
  int state_dim = 0;
  int sample_count = 0;
  Eigen::VectorXd row_scale;  // per-dictionary-row equilibration (1s if off)
};

struct AssembledProgram {
  sdp::SdpProblem problem;
  AssemblyMap map;
};

// Coefficient-matched feasibility program over (theta, sigma, Y):
//   lifted   * Y_a = factor_a * theta            for every basis element a
//   lifted~  * Y_a = factor_a * theta            (same Y: one feedback law)
//   derivs   * Y_a = sigma (a constant) or 0
//   derivs~  * Y_a = sigma (a constant) or 0
//   sigma + sigma' + vartheta*I + epsilon*theta  <= 0
//   theta >= psd_floor * I
struct LiftedPair {
  plant::LiftedData primary;
  plant::LiftedData sibling;
};

AssembledProgram assemble_program(const plant::BatchPair& pair, const LiftedPair& lifted,
                                  const poly::PolyMatrix& dict_factor,
                                  const SynthesisConfig& cfg);

// Research variant that gives the sibling trajectory its own combination
// matrix. Looser than the committed program; used only for feasibility-margin
// comparison, never certified.
AssembledProgram assemble_two_map_relaxation(const plant::BatchPair& pair,
                                             const LiftedPair& lifted,
                                             const poly::PolyMatrix& dict_factor,
                                             const SynthesisConfig& cfg);

}  // namespace deltaiss::synthesis
