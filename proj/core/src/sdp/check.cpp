#include "deltaiss/sdp/check.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "deltaiss/errors.hpp"

namespace deltaiss::sdp {

namespace {

// (i, j) position of an upper-triangle packed entry.
std::pair<int, int> sym_position(int dim, int entry) {
  for (int i = 0; i < dim; ++i) {
    const int row_len = dim - i;
    if (entry < row_len) return {i, i + entry};
    entry -= row_len;
  }
  throw DimensionError("symmetric entry index out of range");
}

double entry_value(const SdpProblem& problem,
                   const std::map<std::string, Eigen::MatrixXd>& assignment, int variable,
                   int entry) {
  const auto& info = problem.variable(variable);
  auto it = assignment.find(info.name);
  if (it == assignment.end())
    throw MissingAssignmentError("no value assigned for variable '" + info.name + "'");
  const Eigen::MatrixXd& value = it->second;
  if (value.rows() != info.rows || value.cols() != info.cols)
    throw DimensionError("assigned value for '" + info.name + "' has wrong shape");
  if (info.kind == VariableInfo::Kind::Symmetric) {
    const auto [i, j] = sym_position(info.rows, entry);
    return 0.5 * (value(i, j) + value(j, i));
  }
  return value(entry / info.cols, entry % info.cols);
}

}  // namespace

ResidualReport check_solution(const SdpProblem& problem,
                              const std::map<std::string, Eigen::MatrixXd>& assignment,
                              double tol) {
  ResidualReport report;
  report.tol = tol;

  for (const auto& eq : problem.equalities()) {
    double lhs = 0.0;
    for (const auto& t : eq.terms)
      lhs += t.coeff * entry_value(problem, assignment, t.variable, t.entry);
    report.equality_residuals.push_back(std::abs(lhs - eq.rhs));
  }
  for (double r : report.equality_residuals)
    report.max_equality_residual = std::max(report.max_equality_residual, r);

  bool ok = report.max_equality_residual <= tol;

  int block_id = 0;
  for (const auto& lmi : problem.lmi_blocks()) {
    Eigen::MatrixXd m = lmi.constant;
    for (const auto& t : lmi.terms)
      m += entry_value(problem, assignment, t.variable, t.entry) * t.coeff;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double eig = es.eigenvalues().maxCoeff();
    report.lmi_lambda_max.emplace_back(
        lmi.label.empty() ? "lmi_" + std::to_string(block_id) : lmi.label, eig);
    ok = ok && eig <= tol;
    ++block_id;
  }

  for (const auto& floor : problem.psd_floors()) {
    const auto& info = problem.variable(floor.variable);
    auto it = assignment.find(info.name);
    if (it == assignment.end())
      throw MissingAssignmentError("no value assigned for variable '" + info.name + "'");
    const Eigen::MatrixXd sym = 0.5 * (it->second + it->second.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    const double eig = es.eigenvalues().minCoeff();
    report.floor_lambda_min.emplace_back(info.name, eig);
    ok = ok && eig >= floor.margin - tol;
  }

  report.pass = ok;
  return report;
}

json ResidualReport::to_json() const {
  json lmis = json::array();
  for (const auto& [label, eig] : lmi_lambda_max)
    lmis.push_back(json{{"label", label}, {"lambda_max", eig}});
  json floors = json::array();
  for (const auto& [name, eig] : floor_lambda_min)
    floors.push_back(json{{"variable", name}, {"lambda_min", eig}});
  return json{{"equality_residuals", equality_residuals},
              {"max_equality_residual", max_equality_residual},
              {"lmi_lambda_max", std::move(lmis)},
              {"floor_lambda_min", std::move(floors)},
              {"tol", tol},
              {"pass", pass}};
}

}  // namespace deltaiss::sdp
