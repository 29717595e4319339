#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "deltaiss/hashing.hpp"
#include "deltaiss/plant/data_batch.hpp"
#include "deltaiss/plant/poly_system.hpp"
#include "deltaiss/poly/dictionary.hpp"
#include "deltaiss/poly/poly_matrix.hpp"

namespace deltaiss::testing {

// Deterministic test RNG.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  double uniform() { return uniform01(splitmix64(state_ += 0x9e3779b97f4a7c15ULL)); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
  }
  Eigen::VectorXd vector(int n, double scale) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(-scale, scale);
    return v;
  }
  Eigen::MatrixXd matrix(int r, int c, double scale) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = uniform(-scale, scale);
    return m;
  }

 private:
  std::uint64_t state_;
};

// Brute-force monomial enumeration: odometer over [0, d_max]^n filtered by
// total degree. Independent of the production generator.
inline std::vector<std::vector<int>> enumerate_exponents_oracle(int n, int d_min, int d_max) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  while (true) {
    int total = 0;
    for (int v : e) total += v;
    if (total >= d_min && total <= d_max) out.push_back(e);
    int pos = n - 1;
    while (pos >= 0) {
      if (++e[static_cast<std::size_t>(pos)] <= d_max) break;
      e[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

inline poly::PolyMatrix random_poly_matrix(Rng& rng, int rows, int cols, int nvars,
                                           int max_degree, int terms) {
  poly::PolyMatrix out(rows, cols, nvars);
  const auto basis = poly::monomial_basis(nvars, 0, max_degree);
  for (int t = 0; t < terms; ++t) {
    const auto& m = basis[static_cast<std::size_t>(rng.integer(0, static_cast<int>(basis.size()) - 1))];
    out.add_term(m, rng.matrix(rows, cols, 1.0));
  }
  return out;
}

// Random plant whose nonlinear dictionary columns live in the range of B, so
// the synthesis program is feasible whenever the data is rich: the linear
// part is shifted toward stability and the nonlinearity is input-matchable.
struct RandomPlantSpec {
  plant::PolySystem sys;
  poly::MonomialDictionary dict;  // synthesis dictionary (same as the true one)
};

inline RandomPlantSpec random_feasible_plant(Rng& rng, int n, int m, int max_degree) {
  auto dict = poly::MonomialDictionary::enumerate(n, 1, max_degree);
  const int N = dict.size();

  Eigen::MatrixXd b = rng.matrix(n, m, 1.0);
  // Keep B well-conditioned on its column space.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv(i) = std::max(sv(i), 0.4);
  b = svd.matrixU().leftCols(m) * sv.asDiagonal() * svd.matrixV().transpose();

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, N);
  // Grlex puts the n degree-1 monomials first.
  a.leftCols(n) = rng.matrix(n, n, 0.8) - 1.2 * Eigen::MatrixXd::Identity(n, n);
  if (N > n) a.rightCols(N - n) = b * rng.matrix(m, N - n, 0.4);
  return RandomPlantSpec{plant::PolySystem(a, b, dict), dict};
}

inline plant::BatchPair quick_pair(const plant::PolySystem& sys, int T, double tau,
                                   std::uint64_t seed,
                                   plant::DerivativeSource source = plant::DerivativeSource::Exact,
                                   double amplitude = 1.2) {
  plant::ExcitationSpec exc;
  exc.kind = plant::ExcitationSpec::Kind::Multisine;
  exc.amplitude = Eigen::VectorXd::Constant(sys.input_dim(), amplitude);
  exc.seed = seed;
  Rng rng(seed ^ 0xabcdef);
  const Eigen::VectorXd x0 = rng.vector(sys.state_dim(), 0.4);
  Eigen::VectorXd x0_tilde = rng.vector(sys.state_dim(), 0.4);
  if (x0 == x0_tilde) x0_tilde.array() += 0.1;
  return plant::collect_pair(sys, exc, x0, x0_tilde, T, tau, source);
}

inline plant::PolySystem scalar_system(double a, double b) {
  auto dict = poly::MonomialDictionary::enumerate(1, 1, 1);
  Eigen::MatrixXd am(1, 1), bm(1, 1);
  am << a;
  bm << b;
  return plant::PolySystem(am, bm, dict);
}

}  // namespace deltaiss::testing
