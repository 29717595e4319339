#include <doctest.h>

#include <cmath>

#include "deltaiss/errors.hpp"
#include "deltaiss/synthesis/synthesize.hpp"
#include "deltaiss/verify/checks.hpp"
#include "deltaiss/verify/closed_loop.hpp"
#include "deltaiss/verify/recheck.hpp"
#include "test_support.hpp"

using namespace deltaiss;
using deltaiss::testing::Rng;

namespace {

struct ScalarFixture {
  plant::PolySystem sys = testing::scalar_system(1.0, 1.0);
  plant::BatchPair pair = testing::quick_pair(sys, 12, 0.1, 31);
  synthesis::Certificate cert;

  ScalarFixture() {
    synthesis::SynthesisConfig cfg;
    cfg.epsilon = 0.5;
    cfg.vartheta = 0.1;
    cfg.dict = poly::MonomialDictionary::enumerate(1, 1, 1);
    cert = synthesis::synthesize(pair, cfg);
  }
};

plant::InputSignal zero_input(int m) {
  return [m](double) { return Eigen::VectorXd::Zero(m); };
}

Eigen::VectorXd scalar_vec(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("identical starts and inputs give the zero trace") {
  ScalarFixture fx;
  const auto trace = verify::simulate_closed_loop_pair(
      fx.sys, fx.cert, scalar_vec(0.8), scalar_vec(0.8), zero_input(1), zero_input(1), 2.0,
      0.01);
  CHECK(trace.diff_norm.cwiseAbs().maxCoeff() == 0.0);
  CHECK(trace.lyapunov.cwiseAbs().maxCoeff() == 0.0);

  const auto g = verify::gronwall_check(trace, fx.cert.epsilon, std::nullopt);
  CHECK(g.pass);

  const auto report = verify::convergence_report({trace});
  CHECK(report.traces[0].monotone_after == 0.0);
  CHECK(report.traces[0].terminal_norm == 0.0);
}

TEST_CASE("scalar closed loop decays at the certified linear rate") {
  ScalarFixture fx;
  const double gain = fx.cert.K.coefficient(poly::Monomial::constant(1))(0, 0);
  const double rate = 1.0 + gain;  // closed-loop pole a + K
  REQUIRE(rate < 0.0);

  const auto trace = verify::simulate_closed_loop_pair(
      fx.sys, fx.cert, scalar_vec(1.0), scalar_vec(-1.0), zero_input(1), zero_input(1), 5.0,
      0.005);
  // |x - x~|(t) = 2 e^{rate t} within 1%.
  for (int k = 0; k < trace.samples(); k += 100) {
    const double expected = 2.0 * std::exp(rate * trace.times(k));
    CHECK(trace.diff_norm(k) == doctest::Approx(expected).epsilon(0.01));
  }

  const auto g = verify::gronwall_check(trace, fx.cert.epsilon, std::nullopt);
  CHECK(g.pass);

  const auto report = verify::convergence_report({trace});
  CHECK(report.traces[0].monotone_after == 0.0);
  CHECK(report.all_converged);
  CHECK(report.traces[0].terminal_norm <=
        2.0 * std::exp(rate * 5.0) * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("sampled decay inequality holds along closed-loop traces") {
  ScalarFixture fx;
  const auto trace = verify::simulate_closed_loop_pair(
      fx.sys, fx.cert, scalar_vec(1.5), scalar_vec(-0.5), zero_input(1), zero_input(1), 4.0,
      0.01);
  int ok = 0, interior = 0;
  const double tol_num = 1e-3 * trace.lyapunov(0) + 1e-12;
  for (int k = 1; k + 1 < trace.samples(); ++k) {
    ++interior;
    if (trace.lie_estimate(k) <= -fx.cert.epsilon * trace.lyapunov(k) + tol_num) ++ok;
  }
  CHECK(static_cast<double>(ok) >= 0.99 * static_cast<double>(interior));
}

TEST_CASE("Lyapunov series stays non-negative and vanishes only at equality") {
  ScalarFixture fx;
  const auto trace = verify::simulate_closed_loop_pair(
      fx.sys, fx.cert, scalar_vec(0.3), scalar_vec(0.2), zero_input(1), zero_input(1), 3.0,
      0.01);
  for (int k = 0; k < trace.samples(); ++k) {
    CHECK(trace.lyapunov(k) >= -1e-12);
    if (trace.lyapunov(k) <= 0.0) CHECK(trace.diff_norm(k) <= 1e-9);
  }
}

TEST_CASE("gronwall: tampered trace fails, differing inputs need rho") {
  ScalarFixture fx;
  auto trace = verify::simulate_closed_loop_pair(fx.sys, fx.cert, scalar_vec(1.0),
                                                 scalar_vec(-1.0), zero_input(1),
                                                 zero_input(1), 3.0, 0.01);
  auto g = verify::gronwall_check(trace, fx.cert.epsilon, std::nullopt);
  CHECK(g.pass);

  trace.lyapunov(trace.samples() / 2) *= 50.0;  // inject a bump
  g = verify::gronwall_check(trace, fx.cert.epsilon, std::nullopt);
  CHECK_FALSE(g.pass);
  CHECK(g.first_violation_time > 0.0);

  // Different external inputs without a gain bound: refused.
  const auto differing = verify::simulate_closed_loop_pair(
      fx.sys, fx.cert, scalar_vec(1.0), scalar_vec(-1.0), zero_input(1),
      [](double) { return scalar_vec(0.5); }, 2.0, 0.01);
  CHECK_THROWS_AS(verify::gronwall_check(differing, fx.cert.epsilon, std::nullopt),
                  MissingRhoBoundError);

  // With the gain bound the integrated bound holds.
  const double rho = 1.0 / fx.cert.vartheta;  // |b| = 1
  const auto bounded = verify::gronwall_check(differing, fx.cert.epsilon, rho);
  CHECK(bounded.pass);
}

TEST_CASE("recheck: fresh certificate reproduces its stored report") {
  ScalarFixture fx;
  const auto report = verify::recheck_certificate(fx.cert, fx.pair, fx.cert.dict);
  CHECK(report.pass);
  CHECK(report.fingerprint_match);
  CHECK(report.stored_vs_fresh_drift <= 1e-10);
  CHECK(report.controller_consistency <= 1e-10);
}

TEST_CASE("recheck: perturbed drift matrix is caught with the right magnitude") {
  ScalarFixture fx;
  auto tampered = fx.cert;
  tampered.sigma(0, 0) += 0.1;
  const auto report = verify::recheck_certificate(tampered, fx.pair, fx.cert.dict);
  CHECK_FALSE(report.pass);
  CHECK(report.fresh.drift_primary == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("recheck: fingerprint mismatch warns but does not fail") {
  ScalarFixture fx;
  auto other = testing::quick_pair(fx.sys, 12, 0.1, 32);  // different seed
  synthesis::SynthesisConfig cfg;
  cfg.epsilon = 0.5;
  cfg.vartheta = 0.1;
  cfg.dict = fx.cert.dict;
  const auto cert_b = synthesis::synthesize(other, cfg);
  // Recheck cert_b against the original pair: data differs so the residuals
  // will not match, but the fingerprint flag is what records the mismatch.
  const auto report = verify::recheck_certificate(cert_b, fx.pair, fx.cert.dict);
  CHECK_FALSE(report.fingerprint_match);
}

TEST_CASE("convergence report sorts traces by id") {
  ScalarFixture fx;
  auto t1 = verify::simulate_closed_loop_pair(fx.sys, fx.cert, scalar_vec(1.0),
                                              scalar_vec(0.5), zero_input(1), zero_input(1),
                                              1.0, 0.01, 7);
  auto t2 = verify::simulate_closed_loop_pair(fx.sys, fx.cert, scalar_vec(-1.0),
                                              scalar_vec(0.5), zero_input(1), zero_input(1),
                                              1.0, 0.01, 3);
  const auto report = verify::convergence_report({t1, t2});
  REQUIRE(report.traces.size() == 2);
  CHECK(report.traces[0].id == 3);
  CHECK(report.traces[1].id == 7);
}
