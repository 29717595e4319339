#include "deltaiss/plant/poly_system.hpp"

#include "deltaiss/errors.hpp"
#include "deltaiss/json_support.hpp"

namespace deltaiss::plant {

PolySystem::PolySystem(Eigen::MatrixXd sys_matrix, Eigen::MatrixXd input_matrix,
                       poly::MonomialDictionary true_dict)
    : A_(std::move(sys_matrix)), B_(std::move(input_matrix)), dict_(std::move(true_dict)) {
  n_ = static_cast<int>(A_.rows());
  m_ = static_cast<int>(B_.cols());
  if (dict_.state_dim() != n_)
    throw DimensionError("dictionary state dimension does not match system matrix rows");
  if (A_.cols() != dict_.size())
    throw DimensionError("system matrix columns must match dictionary size");
  if (B_.rows() != n_) throw DimensionError("input matrix row count must match state dimension");
}

Eigen::VectorXd PolySystem::field(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != n_ || u.size() != m_) throw DimensionError("field argument dimension mismatch");
  return A_ * dict_.evaluate(x) + B_ * u;
}

json PolySystem::to_json() const {
  return json{{"A", matrix_to_json(A_)},
              {"B", matrix_to_json(B_)},
              {"dictionary", dict_.to_json()}};
}

PolySystem PolySystem::from_json(const json& j) {
  return PolySystem(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                    poly::MonomialDictionary::from_json(j.at("dictionary")));
}

PolySystem spacecraft_system() {
  const double j1 = 200.0, j2 = 200.0, j3 = 300.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 0) = (j2 - j3) / j1;
  a(1, 1) = (j3 - j1) / j2;
  a(2, 2) = (j1 - j2) / j3;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  b(0, 0) = 1.0 / j1;
  b(1, 1) = 1.0 / j2;
  b(2, 2) = 1.0 / j3;
  // Coupling terms ordered to match the diagonal of A: x2*x3, x1*x3, x1*x2.
  std::vector<poly::Monomial> entries{poly::Monomial({0, 1, 1}), poly::Monomial({1, 0, 1}),
                                      poly::Monomial({1, 1, 0})};
  auto dict = poly::MonomialDictionary::from_entries(3, entries);
  // from_entries sorts to grlex: x1x2, x1x3, x2x3 -> permute A columns to match.
  Eigen::MatrixXd a_sorted = Eigen::MatrixXd::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    for (std::size_t orig = 0; orig < entries.size(); ++orig) {
      if (dict.entry(k) == entries[orig]) a_sorted.col(k) = a.col(static_cast<int>(orig));
    }
  }
  return PolySystem(a_sorted, b, dict);
}

}  // namespace deltaiss::plant
