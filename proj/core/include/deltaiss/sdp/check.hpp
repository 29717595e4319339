#pragma once

#include <map>
#include <string>
#include <vector>

#include "deltaiss/sdp/problem.hpp"

namespace deltaiss::sdp {

// Independent residual report for a claimed solution. Recomputed from the
// declared problem with dense linear algebra and a symmetric eigensolver
// only; deliberately shares no machinery with solve().
struct ResidualReport {
  std::vector<double> equality_residuals;  // absolute, one per row
  double max_equality_residual = 0.0;
  std::vector<std::pair<std::string, double>> lmi_lambda_max;
  std::vector<std::pair<std::string, double>> floor_lambda_min;  // vs margin
  double tol = 0.0;
  bool pass = false;

  json to_json() const;
};

ResidualReport check_solution(const SdpProblem& problem,
                              const std::map<std::string, Eigen::MatrixXd>& assignment,
                              double tol);

}  // namespace deltaiss::sdp
