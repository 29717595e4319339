#include <doctest.h>

#include <algorithm>

#include "deltaiss/errors.hpp"
#include "deltaiss/poly/dictionary.hpp"
#include "deltaiss/poly/factorize.hpp"
#include "deltaiss/poly/poly_matrix.hpp"
#include "test_support.hpp"

using namespace deltaiss;
using deltaiss::testing::Rng;

namespace {

poly::Monomial mono(std::vector<int> e) { return poly::Monomial(std::move(e)); }

Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("monomial basics") {
  const auto m = mono({2, 0, 1});
  CHECK(m.degree() == 3);
  CHECK(m.str() == "x1^2*x3");
  CHECK(m.evaluate(vec3(2, 5, 3)) == doctest::Approx(12.0));
  CHECK(mono({0, 0, 0}).is_constant());
  CHECK((mono({1, 1, 0}) * mono({0, 1, 1})).exponents() == std::vector<int>{1, 2, 1});
  CHECK(m.divided_by(0).exponents() == std::vector<int>{1, 0, 1});
  CHECK_THROWS_AS(mono({0, 1}).divided_by(0), ZeroDegreeEntryError);
  CHECK_THROWS_AS(poly::Monomial(std::vector<int>{-1, 2}), InvalidDegreeRangeError);
}

TEST_CASE("enumeration order and count") {
  // n=3, degrees 1..2: x1, x2, x3, x1^2, x1x2, x1x3, x2^2, x2x3, x3^2.
  const auto dict = poly::MonomialDictionary::enumerate(3, 1, 2);
  REQUIRE(dict.size() == 9);
  const std::vector<std::vector<int>> expected{
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0}, {1, 1, 0},
      {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  for (int k = 0; k < dict.size(); ++k) CHECK(dict.entry(k).exponents() == expected[static_cast<std::size_t>(k)]);

  const auto single = poly::MonomialDictionary::enumerate(1, 1, 1);
  CHECK(single.size() == 1);
  CHECK(single.entry(0).exponents() == std::vector<int>{1});

  CHECK_THROWS_AS(poly::MonomialDictionary::enumerate(3, 0, 2), InvalidDegreeRangeError);
  CHECK_THROWS_AS(poly::MonomialDictionary::enumerate(3, 3, 2), InvalidDegreeRangeError);
}

TEST_CASE("enumeration matches the brute-force oracle") {
  for (int n = 1; n <= 4; ++n) {
    for (int dmax = 1; dmax <= 3; ++dmax) {
      const auto dict = poly::MonomialDictionary::enumerate(n, 1, dmax);
      auto oracle = testing::enumerate_exponents_oracle(n, 1, dmax);
      CHECK(dict.size() == static_cast<int>(oracle.size()));
      // Same set regardless of order.
      std::vector<std::vector<int>> got;
      for (const auto& m : dict.entries()) got.push_back(m.exponents());
      std::sort(got.begin(), got.end());
      std::sort(oracle.begin(), oracle.end());
      CHECK(got == oracle);
    }
  }
}

TEST_CASE("explicit dictionary mode reproduces the demo dictionary") {
  std::vector<poly::Monomial> entries{mono({1, 0, 0}), mono({0, 1, 0}), mono({0, 0, 1}),
                                      mono({2, 0, 0}), mono({1, 1, 0}), mono({1, 0, 1}),
                                      mono({0, 1, 1})};
  const auto dict = poly::MonomialDictionary::from_entries(3, entries);
  REQUIRE(dict.size() == 7);
  for (int k = 0; k < 7; ++k) CHECK(dict.entry(k) == entries[static_cast<std::size_t>(k)]);

  // Evaluation example at (1, 2, 3).
  const Eigen::VectorXd v = dict.evaluate(vec3(1, 2, 3));
  Eigen::VectorXd expected(7);
  expected << 1, 2, 3, 1, 2, 3, 6;
  CHECK((v - expected).cwiseAbs().maxCoeff() == 0.0);

  // F(0) = 0 by the degree >= 1 invariant.
  CHECK(dict.evaluate(Eigen::VectorXd::Zero(3)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(poly::MonomialDictionary::from_entries(
                      2, std::vector<poly::Monomial>{mono({0, 0})}),
                  ZeroDegreeEntryError);
  CHECK_THROWS_AS(poly::MonomialDictionary::from_entries(
                      2, std::vector<poly::Monomial>{mono({1, 0}), mono({1, 0})}),
                  InvalidDegreeRangeError);
}

TEST_CASE("dictionary serialization is deterministic") {
  const auto dict = poly::MonomialDictionary::enumerate(3, 1, 3);
  const auto a = dict.to_json().dump();
  const auto b = poly::MonomialDictionary::from_json(dict.to_json()).to_json().dump();
  CHECK(a == b);
  CHECK(poly::MonomialDictionary::from_json(dict.to_json()) == dict);
}

TEST_CASE("poly matrix product of constants is the matrix product") {
  Rng rng(7);
  const Eigen::MatrixXd a = rng.matrix(3, 4, 1.0);
  const Eigen::MatrixXd b = rng.matrix(4, 2, 1.0);
  const auto pa = poly::PolyMatrix::constant(a, 2);
  const auto pb = poly::PolyMatrix::constant(b, 2);
  const auto prod = poly_multiply(pa, pb);
  CHECK(prod.term_count() == 1);
  CHECK((prod.coefficient(poly::Monomial::constant(2)) - a * b).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("factorization round-trip example [x2 0] * x = x1 x2") {
  poly::PolyMatrix row(1, 2, 2);
  Eigen::MatrixXd c(1, 2);
  c << 1, 0;
  row.add_term(mono({0, 1}), c);  // [x2, 0]
  const auto prod = poly_multiply(row, poly::PolyMatrix::state_column(2));
  CHECK(prod.term_count() == 1);
  CHECK(prod.coefficient(mono({1, 1}))(0, 0) == 1.0);
}

TEST_CASE("evaluation commutes with multiplication") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int nvars = rng.integer(1, 3);
    const int inner = rng.integer(1, 3);
    const auto a = testing::random_poly_matrix(rng, rng.integer(1, 3), inner, nvars, 2, 4);
    const auto b = testing::random_poly_matrix(rng, inner, rng.integer(1, 3), nvars, 2, 4);
    const Eigen::VectorXd p = rng.vector(nvars, 1.5);
    const Eigen::MatrixXd lhs = poly_multiply(a, b).evaluate(p);
    const Eigen::MatrixXd rhs = a.evaluate(p) * b.evaluate(p);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale <= 1e-12);
  }
}

TEST_CASE("residual examples") {
  Rng rng(5);
  const auto a = testing::random_poly_matrix(rng, 2, 2, 2, 2, 5);
  CHECK(poly_residual(a, a) == 0.0);

  auto b = a;
  Eigen::MatrixXd bump = Eigen::MatrixXd::Zero(2, 2);
  bump(1, 0) = 1e-3;
  b.add_term(mono({1, 1}), bump);
  CHECK(poly_residual(a, b) == doctest::Approx(1e-3));

  CHECK_THROWS_AS(poly_residual(a, testing::random_poly_matrix(rng, 3, 2, 2, 1, 2)),
                  DimensionError);
}

TEST_CASE("canonical form drops exact zeros") {
  poly::PolyMatrix p(2, 2, 2);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Ones(2, 2);
  p.add_term(mono({1, 0}), m);
  p.add_term(mono({1, 0}), -m);
  CHECK(p.term_count() == 0);
  CHECK(p.is_zero());
}

TEST_CASE("dictionary factor: identity and structure") {
  // Singleton dictionary {x1}: factor is the constant [1].
  const auto single = poly::MonomialDictionary::enumerate(1, 1, 1);
  const auto f1 = poly::factorize_dictionary(single);
  CHECK(f1.term_count() == 1);
  CHECK(f1.coefficient(poly::Monomial::constant(1))(0, 0) == 1.0);

  // {x1 x2} in two variables: lowest-index rule factors out x1.
  const auto cross = poly::MonomialDictionary::from_entries(
      2, std::vector<poly::Monomial>{mono({1, 1})});
  const auto f2 = poly::factorize_dictionary(cross);
  const Eigen::MatrixXd c = f2.coefficient(mono({0, 1}));
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 1) == 0.0);

  // Demo dictionary: the x2x3 row factors by x2, giving quotient x3 in
  // column 2.
  std::vector<poly::Monomial> entries{mono({1, 0, 0}), mono({0, 1, 0}), mono({0, 0, 1}),
                                      mono({2, 0, 0}), mono({1, 1, 0}), mono({1, 0, 1}),
                                      mono({0, 1, 1})};
  const auto dict = poly::MonomialDictionary::from_entries(3, entries);
  const auto f = poly::factorize_dictionary(dict);
  const Eigen::MatrixXd constant = f.coefficient(poly::Monomial::constant(3));
  CHECK(constant.topLeftCorner(3, 3) == Eigen::MatrixXd::Identity(3, 3));
  const Eigen::MatrixXd x3_block = f.coefficient(mono({0, 0, 1}));
  CHECK(x3_block(6, 1) == 1.0);  // x2x3 = x3 * x2
  CHECK(x3_block(5, 0) == 1.0);  // x1x3 = x3 * x1
}

TEST_CASE("factorization identity holds exactly for random dictionaries") {
  Rng rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 4);
    const int dmax = rng.integer(1, 4);
    auto full = poly::MonomialDictionary::enumerate(n, 1, dmax);
    // Random subset, kept non-empty.
    std::vector<poly::Monomial> subset;
    for (const auto& m : full.entries())
      if (rng.uniform() < 0.6) subset.push_back(m);
    if (subset.empty()) subset.push_back(full.entry(0));
    const auto dict = poly::MonomialDictionary::from_entries(n, subset);

    const auto factor = poly::factorize_dictionary(dict);
    const auto rebuilt = poly_multiply(factor, poly::PolyMatrix::state_column(n));
    CHECK(poly_residual(rebuilt, poly::PolyMatrix::dictionary_column(dict)) == 0.0);
  }
}

TEST_CASE("factor times a constant matrix keeps the factor's term set") {
  Rng rng(4321);
  std::vector<poly::Monomial> entries{mono({1, 0, 0}), mono({0, 1, 0}), mono({0, 0, 1}),
                                      mono({2, 0, 0}), mono({1, 1, 0}), mono({1, 0, 1}),
                                      mono({0, 1, 1})};
  const auto dict = poly::MonomialDictionary::from_entries(3, entries);
  const auto factor = poly::factorize_dictionary(dict);
  const Eigen::MatrixXd theta = rng.matrix(3, 3, 1.0) + 3.0 * Eigen::MatrixXd::Identity(3, 3);
  const auto prod = poly_multiply(factor, poly::PolyMatrix::constant(theta, 3));
  CHECK(prod.term_count() == factor.term_count());
  for (const auto& [m, c] : factor.terms()) CHECK(prod.has_term(m));
}

TEST_CASE("poly matrix serialization round-trip") {
  Rng rng(11);
  const auto p = testing::random_poly_matrix(rng, 2, 3, 2, 3, 6);
  const auto q = poly::PolyMatrix::from_json(p.to_json());
  CHECK(poly_residual(p, q) == 0.0);
  CHECK(p.to_json().dump() == q.to_json().dump());
}
