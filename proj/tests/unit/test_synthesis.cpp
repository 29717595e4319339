#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <filesystem>

#include "deltaiss/errors.hpp"
#include "deltaiss/plant/lift.hpp"
#include "deltaiss/poly/factorize.hpp"
#include "deltaiss/synthesis/synthesize.hpp"
#include "test_support.hpp"

using namespace deltaiss;
using deltaiss::testing::Rng;

namespace {

synthesis::SynthesisConfig scalar_config(double epsilon, double vartheta) {
  synthesis::SynthesisConfig cfg;
  cfg.epsilon = epsilon;
  cfg.vartheta = vartheta;
  cfg.dict = poly::MonomialDictionary::enumerate(1, 1, 1);
  return cfg;
}

poly::MonomialDictionary demo_dictionary() {
  std::vector<poly::Monomial> entries{
      poly::Monomial({1, 0, 0}), poly::Monomial({0, 1, 0}), poly::Monomial({0, 0, 1}),
      poly::Monomial({2, 0, 0}), poly::Monomial({1, 1, 0}), poly::Monomial({1, 0, 1}),
      poly::Monomial({0, 1, 1})};
  return poly::MonomialDictionary::from_entries(3, entries);
}

plant::BatchPair spacecraft_pair(int T = 300) {
  plant::ExcitationSpec exc;
  exc.amplitude = Eigen::VectorXd::Constant(3, 60.0);
  exc.seed = 42;
  Eigen::VectorXd x0(3), x1(3);
  x0 << 0.6, -0.4, 0.5;
  x1 << -0.3, 0.5, -0.2;
  return plant::collect_pair(plant::spacecraft_system(), exc, x0, x1, T, 0.1,
                             plant::DerivativeSource::Exact);
}

}  // namespace

TEST_CASE("assembly: scalar instance has the expected unknowns and rows") {
  const auto sys = testing::scalar_system(1.0, 1.0);
  const int T = 10;
  const auto pair = testing::quick_pair(sys, T, 0.1, 9);
  auto cfg = scalar_config(0.5, 0.1);
  synthesis::LiftedPair lifted{plant::lift(pair.batch, cfg.dict),
                               plant::lift(pair.sibling, cfg.dict)};
  const auto factor = poly::factorize_dictionary(cfg.dict);
  const auto assembled = synthesis::assemble_program(pair, lifted, factor, cfg);

  // theta (1) + sigma (1) + one constant combination block (T x 1).
  CHECK(assembled.problem.scalar_count() == 2 + T);
  CHECK(assembled.map.y_basis.size() == 1);
  // Four matched rows: two lifted matches, two derivative matches.
  CHECK(assembled.problem.equalities().size() == 4);
  CHECK(assembled.problem.lmi_blocks().size() == 1);
  CHECK(assembled.problem.psd_floors().size() == 1);
}

TEST_CASE("assembly: demo-scale unknown counts") {
  const auto pair = spacecraft_pair(300);
  synthesis::SynthesisConfig cfg;
  cfg.epsilon = 0.9;
  cfg.vartheta = 0.44;
  cfg.dict = demo_dictionary();
  synthesis::LiftedPair lifted{plant::lift(pair.batch, cfg.dict),
                               plant::lift(pair.sibling, cfg.dict)};
  const auto factor = poly::factorize_dictionary(cfg.dict);
  const auto assembled = synthesis::assemble_program(pair, lifted, factor, cfg);
  // Combination basis {1, x1, x2, x3}: 4 * 300 * 3 free coefficients,
  // plus 6 (packed symmetric) + 9.
  CHECK(assembled.map.y_basis.size() == 4);
  CHECK(assembled.problem.scalar_count() == 4 * 300 * 3 + 6 + 9);
}

TEST_CASE("assembly rejects an unmatchable combination degree") {
  const auto pair = spacecraft_pair(120);
  synthesis::SynthesisConfig cfg;
  cfg.dict = demo_dictionary();
  cfg.y_degree = 0;  // the factor has degree 1
  synthesis::LiftedPair lifted{plant::lift(pair.batch, cfg.dict),
                               plant::lift(pair.sibling, cfg.dict)};
  const auto factor = poly::factorize_dictionary(cfg.dict);
  CHECK_THROWS_AS(synthesis::assemble_program(pair, lifted, factor, cfg), DegreeTooLowError);
}

TEST_CASE("free-parameter count matches the dense oracle on a small instance") {
  Rng rng(606);
  const auto spec = testing::random_feasible_plant(rng, 2, 2, 2);
  const int T = 20;
  const auto pair = testing::quick_pair(spec.sys, T, 0.4, 77);
  synthesis::SynthesisConfig cfg;
  cfg.dict = spec.dict;
  synthesis::LiftedPair lifted{plant::lift(pair.batch, cfg.dict),
                               plant::lift(pair.sibling, cfg.dict)};
  REQUIRE(lifted.primary.rank == cfg.dict.size());
  const auto factor = poly::factorize_dictionary(cfg.dict);
  const auto assembled = synthesis::assemble_program(pair, lifted, factor, cfg);

  const auto red = sdp::presolve_eliminate(assembled.problem);

  // Dense oracle: stack the full equality system (row-equilibrated) and
  // count unknowns minus rank via an SVD, independent of the presolve path.
  const auto& p = assembled.problem;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(p.equalities().size()), p.scalar_count());
  for (std::size_t r = 0; r < p.equalities().size(); ++r)
    for (const auto& t : p.equalities()[r].terms)
      dense(static_cast<Eigen::Index>(r), p.flat_index(t.variable, t.entry)) += t.coeff;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    const double scale = dense.row(r).cwiseAbs().maxCoeff();
    if (scale > 0.0) dense.row(r) /= scale;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const double thresh = std::max(dense.rows(), dense.cols()) *
                        std::numeric_limits<double>::epsilon() * svd.singularValues()(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++rank;

  CHECK(red.free_parameter_count() == p.scalar_count() - rank);

  // For rich data with a square input matrix the count decomposes into
  // dim(theta) + dim(sigma) + the combination-block nullity: the induced
  // constraints on (theta, sigma) all vanish, so the equality rank lives
  // entirely on the combination coefficients.
  const int n = 2;
  const int y_unknowns = static_cast<int>(assembled.map.y_basis.size()) * T * n;
  CHECK(red.free_parameter_count() ==
        n * (n + 1) / 2 + n * n + (y_unknowns - rank));
}

TEST_CASE("synthesize: hand-solved scalar plant") {
  // xdot = x + u with decay 0.5 and split 0.1.
  const auto sys = testing::scalar_system(1.0, 1.0);
  const auto pair = testing::quick_pair(sys, 12, 0.1, 31);
  const auto cert = synthesis::synthesize(pair, scalar_config(0.5, 0.1));

  const double theta = cert.theta(0, 0);
  const double sigma = cert.sigma(0, 0);
  CHECK(theta > 0.0);
  CHECK(2.0 * sigma + 0.1 + 0.5 * theta <= 1e-9);

  // Closed-loop gain: sigma = (a + K) theta with a = b = 1.
  const double gain = cert.K.coefficient(poly::Monomial::constant(1))(0, 0);
  CHECK(1.0 + gain == doctest::Approx(sigma / theta).epsilon(1e-6));
  CHECK(1.0 + gain <= -(0.1 + 0.5 * theta) / (2.0 * theta) + 1e-9);
  CHECK(1.0 + gain < 0.0);

  // Feedback law evaluation.
  Eigen::VectorXd x(1), u_hat(1);
  x << 3.0;
  u_hat << 0.0;
  CHECK(synthesis::controller_evaluate(cert, x, u_hat)(0) ==
        doctest::Approx(gain * 3.0).epsilon(1e-12));
  x << 0.0;
  u_hat << 0.7;
  CHECK(synthesis::controller_evaluate(cert, x, u_hat)(0) == doctest::Approx(0.7));
}

TEST_CASE("synthesize: spacecraft demo configuration") {
  const auto pair = spacecraft_pair(300);
  synthesis::SynthesisConfig cfg;
  cfg.epsilon = 0.9;
  cfg.vartheta = 0.44;
  cfg.dict = demo_dictionary();
  const auto cert = synthesis::synthesize(pair, cfg);

  const auto& r = cert.residual_report;
  CHECK(r.pass);
  CHECK(r.match_primary <= 1e-6);
  CHECK(r.match_sibling <= 1e-6);
  CHECK(r.drift_primary <= 1e-6);
  CHECK(r.drift_sibling <= 1e-6);
  CHECK(r.decay_lambda_max <= 1e-6);
  CHECK(r.metric_identity <= 1e-8);

  // Sandwich bounds on 1000 random pairs.
  Rng rng(505);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = rng.vector(3, 10.0);
    const Eigen::VectorXd y = rng.vector(3, 10.0);
    const double d2 = (x - y).squaredNorm();
    const double v = cert.lyapunov(x, y);
    CHECK(v >= cert.alpha_lower * d2 - 1e-9 * std::max(1.0, d2));
    CHECK(v <= cert.alpha_upper * d2 + 1e-9 * std::max(1.0, d2));
  }
  // V(x, x) = 0, symmetry, positivity.
  const Eigen::VectorXd x = rng.vector(3, 5.0);
  const Eigen::VectorXd y = rng.vector(3, 5.0);
  CHECK(cert.lyapunov(x, x) == 0.0);
  CHECK(cert.lyapunov(x, y) == doctest::Approx(cert.lyapunov(y, x)));
  CHECK(cert.lyapunov(x, y) > 0.0);

  // The metric stays clear of the strict-positivity floor in inverse form.
  CHECK(cert.alpha_upper <= 1.0 / cert.psd_floor * (1.0 + 1e-9));
}

TEST_CASE("synthesize: data-driven closed-loop identity with a known plant") {
  Rng rng(808);
  const auto spec = testing::random_feasible_plant(rng, 2, 2, 2);
  const auto pair = testing::quick_pair(spec.sys, 20, 0.4, 909);
  synthesis::SynthesisConfig cfg;
  cfg.epsilon = 0.5;
  cfg.vartheta = 0.1;
  cfg.dict = spec.dict;
  const auto cert = synthesis::synthesize(pair, cfg);

  // With exact derivatives, A F(x) + B (U0 G(x) x) == X1 G(x) x as
  // polynomials, where G = Y P.
  const int n = 2;
  const auto g = poly_multiply(cert.Y, poly::PolyMatrix::constant(cert.P, n));
  const auto gx = poly_multiply(g, poly::PolyMatrix::state_column(n));
  const auto lhs =
      poly_multiply(poly::PolyMatrix::constant(spec.sys.sys_matrix(), n),
                    poly::PolyMatrix::dictionary_column(spec.dict)) +
      poly_multiply(poly::PolyMatrix::constant(spec.sys.input_matrix() * pair.batch.inputs, n),
                    gx);
  const auto rhs = poly_multiply(poly::PolyMatrix::constant(pair.batch.derivs, n), gx);
  CHECK(poly_residual(lhs, rhs) <= 1e-8);
}

TEST_CASE("synthesize: genuinely unstabilizable data is infeasible") {
  // xdot = x with a dead input channel: the drift is pinned to a positive
  // multiple of theta, so no decay certificate can exist.
  const auto sys = testing::scalar_system(1.0, 0.0);
  const auto pair = testing::quick_pair(sys, 12, 0.1, 77);
  CHECK_THROWS_AS(synthesis::synthesize(pair, scalar_config(0.5, 0.1)), InfeasibleError);

  try {
    synthesis::synthesize(pair, scalar_config(0.5, 0.1));
  } catch (const InfeasibleError& e) {
    CHECK(e.margin < 0.0);
    CHECK(e.most_violated == "decay");
  }
}

TEST_CASE("synthesize: rank-deficient data is rejected up front") {
  const auto sys = plant::spacecraft_system();
  plant::ExcitationSpec none;
  none.amplitude = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd x1(3);
  x1 << 0.3, 0.5, -0.2;
  const auto pair = plant::collect_pair(sys, none, Eigen::VectorXd::Zero(3), x1, 60, 0.1,
                                        plant::DerivativeSource::Exact);
  synthesis::SynthesisConfig cfg;
  cfg.dict = demo_dictionary();
  CHECK_THROWS_AS(synthesis::synthesize(pair, cfg), RichnessError);
}

TEST_CASE("certificate JSON round-trip is exact") {
  const auto sys = testing::scalar_system(1.0, 1.0);
  const auto pair = testing::quick_pair(sys, 12, 0.1, 31);
  const auto cert = synthesis::synthesize(pair, scalar_config(0.5, 0.1));

  const auto dir = std::filesystem::temp_directory_path() / "deltaiss_cert_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "cert.json";
  cert.save(file);
  const auto loaded = synthesis::Certificate::load(file);
  CHECK((loaded.P - cert.P).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.sigma - cert.sigma).cwiseAbs().maxCoeff() == 0.0);
  CHECK(poly_residual(loaded.Y, cert.Y) == 0.0);
  CHECK(poly_residual(loaded.K, cert.K) == 0.0);
  CHECK(loaded.data_fingerprint == cert.data_fingerprint);
  // Reproducibility: identical content serializes byte-identically.
  CHECK(loaded.to_json().dump() == cert.to_json().dump());
  std::filesystem::remove_all(dir);
}

TEST_CASE("two-map relaxation diagnostic runs and is no tighter") {
  const auto sys = testing::scalar_system(1.0, 1.0);
  const auto pair = testing::quick_pair(sys, 12, 0.1, 31);
  const auto diag = synthesis::diagnose_two_map_relaxation(pair, scalar_config(0.5, 0.1));
  CHECK(diag.single_feasible);
  CHECK(diag.two_map_feasible);
  CHECK(diag.two_map_margin >= diag.single_map_margin - 1e-6);
}
