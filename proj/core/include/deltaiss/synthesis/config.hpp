#pragma once

#include <optional>

#include "deltaiss/plant/lift.hpp"
#include "deltaiss/poly/dictionary.hpp"
#include "deltaiss/sdp/solve.hpp"

namespace deltaiss::synthesis {

struct SynthesisConfig {
  double epsilon = 0.9;   // certified decay rate, > 0
  double vartheta = 0.44; // Young's-inequality split parameter, > 0
  // Degree of the polynomial combination matrix; -1 selects the minimum
  // structurally admissible degree (dictionary degree - 1).
  int y_degree = -1;
  poly::MonomialDictionary dict = poly::MonomialDictionary::enumerate(1, 1, 1);
  double psd_floor = 1e-6;     // strict positivity margin on the inverse metric
  double verify_tol = 1e-6;    // independent residual acceptance
  bool row_scaling = false;    // equilibrate lifted-data rows before assembly
  std::optional<double> input_matrix_norm_bound;  // enables the gain bound rho
  bool auto_retry = false;     // on infeasibility, retry over a small
                               // (epsilon, vartheta) grid
  sdp::SolveOptions solver;
  plant::RankOptions rank;

  void validate() const;
};

}  // namespace deltaiss::synthesis
