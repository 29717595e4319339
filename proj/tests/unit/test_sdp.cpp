#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "deltaiss/errors.hpp"
#include "deltaiss/sdp/check.hpp"
#include "deltaiss/sdp/presolve.hpp"
#include "deltaiss/sdp/solve.hpp"
#include "test_support.hpp"

using namespace deltaiss;
using deltaiss::testing::Rng;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// The hand-solvable scalar instance: theta symmetric(1), sigma free(1x1),
// equality sigma = rhs, LMI 2 sigma + 0.1 + 0.5 theta <= 0, theta >= 1e-6.
sdp::SdpProblem scalar_instance(double sigma_rhs) {
  sdp::SdpProblem p;
  const int theta = p.declare_symmetric("theta", 1);
  const int sigma = p.declare_free("sigma", 1, 1);
  p.add_equality({sdp::LinearTerm{sigma, 0, 1.0}}, sigma_rhs);
  sdp::LmiBlock lmi;
  lmi.dim = 1;
  lmi.label = "decay";
  lmi.constant = scalar(0.1);
  lmi.terms.push_back(sdp::LmiTerm{sigma, 0, scalar(2.0)});
  lmi.terms.push_back(sdp::LmiTerm{theta, 0, scalar(0.5)});
  p.add_lmi(std::move(lmi));
  p.add_psd_floor("theta", 1e-6);
  return p;
}

}  // namespace

TEST_CASE("builder validation") {
  sdp::SdpProblem p;
  p.declare_symmetric("theta", 3);
  CHECK_THROWS_AS(p.declare_free("theta", 2, 2), DuplicateNameError);
  CHECK_THROWS_AS(p.variable_index("sigma"), UndeclaredVariableError);
  CHECK_THROWS_AS(p.add_psd_floor("sigma", 1e-6), UndeclaredVariableError);

  // Entry range: symmetric(3) has 6 packed entries.
  CHECK_THROWS_AS(p.add_equality({sdp::LinearTerm{0, 6, 1.0}}, 0.0), DimensionError);

  // LMI coefficient of the wrong dimension.
  sdp::LmiBlock bad;
  bad.dim = 2;
  bad.constant = Eigen::MatrixXd::Zero(2, 2);
  bad.terms.push_back(sdp::LmiTerm{0, 0, Eigen::MatrixXd::Zero(3, 3)});
  CHECK_THROWS_AS(p.add_lmi(bad), DimensionError);

  sdp::LmiBlock odd;
  odd.dim = 3;
  odd.constant = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(p.add_lmi(odd), DimensionError);

  // Well-formed single-floor problem.
  sdp::SdpProblem ok;
  ok.declare_symmetric("theta", 3);
  ok.add_psd_floor("theta", 1e-6);
  CHECK(ok.psd_floors().size() == 1);
}

TEST_CASE("symmetric packing round-trip") {
  sdp::SdpProblem p;
  const int v = p.declare_symmetric("s", 3);
  Rng rng(17);
  Eigen::MatrixXd m = rng.matrix(3, 3, 1.0);
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(p.scalar_count());
  p.pack(v, m, &flat);
  const Eigen::MatrixXd back = p.unpack(v, flat);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back == back.transpose().eval());
}

TEST_CASE("presolve: pinned variable leaves a constant LMI") {
  // y = 3 with LMI [y - 4] <= 0 reduces to the constant [-1].
  sdp::SdpProblem p;
  const int y = p.declare_free("y", 1, 1);
  p.add_equality({sdp::LinearTerm{y, 0, 1.0}}, 3.0);
  sdp::LmiBlock lmi;
  lmi.dim = 1;
  lmi.constant = scalar(-4.0);
  lmi.terms.push_back(sdp::LmiTerm{y, 0, scalar(1.0)});
  p.add_lmi(std::move(lmi));

  const auto red = sdp::presolve_eliminate(p);
  CHECK(red.reduced_variable_count() == 0);
  REQUIRE(red.reduced_problem().lmi_blocks().size() == 1);
  CHECK(red.reduced_problem().lmi_blocks()[0].constant(0, 0) == doctest::Approx(-1.0));
  CHECK(red.reduced_problem().lmi_blocks()[0].terms.empty());

  const auto sol = sdp::solve(p);
  CHECK(sol.status == sdp::SolveStatus::Feasible);
  CHECK(sol.assignment.at("y")(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("presolve: inconsistent equalities are reported") {
  sdp::SdpProblem p;
  const int y = p.declare_free("y", 1, 1);
  p.add_equality({sdp::LinearTerm{y, 0, 1.0}}, 1.0);
  p.add_equality({sdp::LinearTerm{y, 0, 1.0}}, 2.0);
  CHECK_THROWS_AS(sdp::presolve_eliminate(p), InconsistentEqualitiesError);
}

TEST_CASE("presolve: recovery satisfies the equalities for random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    sdp::SdpProblem p;
    const int a = p.declare_symmetric("a", 2);
    const int b = p.declare_free("b", 3, 2);
    const int rows = rng.integer(1, 6);
    // Build consistent equalities from a reference point.
    Eigen::VectorXd ref(p.scalar_count());
    for (int i = 0; i < p.scalar_count(); ++i) ref(i) = rng.uniform(-1, 1);
    for (int r = 0; r < rows; ++r) {
      std::vector<sdp::LinearTerm> terms;
      double rhs = 0.0;
      for (int t = 0; t < 4; ++t) {
        const int var = rng.uniform() < 0.5 ? a : b;
        const int entry = rng.integer(0, var == a ? 2 : 5);
        const double coeff = rng.uniform(-2, 2);
        terms.push_back(sdp::LinearTerm{var, entry, coeff});
        rhs += coeff * ref(p.flat_index(var, entry));
      }
      p.add_equality(std::move(terms), rhs);
    }
    // Make "a" visible through a floor so the reduction has both kinds.
    p.add_psd_floor("a", 0.0);

    const auto red = sdp::presolve_eliminate(p);
    for (int probe = 0; probe < 3; ++probe) {
      const Eigen::VectorXd v = rng.vector(red.reduced_variable_count(), 1.0);
      const Eigen::VectorXd z = red.recover_flat(v);
      for (const auto& eq : p.equalities()) {
        double lhs = 0.0;
        for (const auto& t : eq.terms) lhs += t.coeff * z(p.flat_index(t.variable, t.entry));
        CHECK(std::abs(lhs - eq.rhs) <= 1e-9);
      }
    }
  }
}

TEST_CASE("solve: hand-checkable scalar instance") {
  const auto sol = sdp::solve(scalar_instance(-1.0));
  CHECK(sol.status == sdp::SolveStatus::Feasible);
  const double theta = sol.assignment.at("theta")(0, 0);
  const double sigma = sol.assignment.at("sigma")(0, 0);
  CHECK(sigma == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(theta > 0.0);
  CHECK(theta <= 3.8);  // 2(-1) + 0.1 + 0.5 theta <= 0
  CHECK(sol.stats.margin > 0.0);

  // Round-trip property: solver output passes the independent check.
  const auto report = sdp::check_solution(scalar_instance(-1.0), sol.assignment, 1e-7);
  CHECK(report.pass);
}

TEST_CASE("solve: sign-flipped instance is infeasible") {
  const auto sol = sdp::solve(scalar_instance(1.0));
  CHECK(sol.status == sdp::SolveStatus::Infeasible);
  CHECK(sol.stats.margin < 0.0);
  CHECK(sol.stats.most_violated == "decay");
}

TEST_CASE("solve: empty constraint set is trivially feasible") {
  sdp::SdpProblem p;
  p.declare_free("anything", 2, 2);
  const auto sol = sdp::solve(p);
  CHECK(sol.status == sdp::SolveStatus::Feasible);
  CHECK(sol.assignment.count("anything") == 1);
}

TEST_CASE("check_solution: hand-built points") {
  const auto p = scalar_instance(-1.0);
  std::map<std::string, Eigen::MatrixXd> point{{"theta", scalar(1.0)},
                                               {"sigma", scalar(-1.0)}};
  const auto report = sdp::check_solution(p, point, 1e-6);
  CHECK(report.pass);
  REQUIRE(report.lmi_lambda_max.size() == 1);
  CHECK(report.lmi_lambda_max[0].second == doctest::Approx(-1.4));

  // Perturbing sigma violates its equality by exactly the perturbation.
  point["sigma"] = scalar(-0.9);
  const auto bad = sdp::check_solution(p, point, 1e-6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_equality_residual == doctest::Approx(0.1));

  std::map<std::string, Eigen::MatrixXd> missing{{"theta", scalar(1.0)}};
  CHECK_THROWS_AS(sdp::check_solution(p, missing, 1e-6), MissingAssignmentError);
}

TEST_CASE("corrupted solutions are rejected") {
  const auto p = scalar_instance(-1.0);
  auto sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::SolveStatus::Feasible);
  sol.assignment.at("sigma")(0, 0) *= -1.0;  // sign flip
  CHECK_FALSE(sdp::check_solution(p, sol.assignment, 1e-6).pass);
}

TEST_CASE("solve keeps symmetric variables exactly symmetric") {
  sdp::SdpProblem p;
  const int s = p.declare_symmetric("s", 3);
  (void)s;
  p.add_psd_floor("s", 0.5);
  const auto sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::SolveStatus::Feasible);
  const Eigen::MatrixXd& m = sol.assignment.at("s");
  CHECK(m == m.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= 0.5 - 1e-9);
}

TEST_CASE("problem serialization round-trip") {
  const auto p = scalar_instance(-1.0);
  const auto q = sdp::SdpProblem::from_json(p.to_json());
  CHECK(p.to_json().dump() == q.to_json().dump());
  // Solving the reparsed problem behaves identically.
  const auto sol = sdp::solve(q);
  CHECK(sol.status == sdp::SolveStatus::Feasible);
}

TEST_CASE("solution serialization round-trip") {
  const auto sol = sdp::solve(scalar_instance(-1.0));
  const auto back = sdp::SdpSolution::from_json(sol.to_json());
  CHECK(back.status == sol.status);
  CHECK((back.assignment.at("theta") - sol.assignment.at("theta")).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(back.stats.margin == sol.stats.margin);
}
