#include "deltaiss/poly/factorize.hpp"

#include "deltaiss/errors.hpp"

namespace deltaiss::poly {

PolyMatrix factorize_dictionary(const MonomialDictionary& dict) {
  const int n = dict.state_dim();
  const int N = dict.size();
  PolyMatrix out(N, n, n);
  for (int k = 0; k < N; ++k) {
    const Monomial& entry = dict.entry(k);
    int pivot = -1;
    for (int j = 0; j < n; ++j) {
      if (entry.exponents()[static_cast<std::size_t>(j)] > 0) {
        pivot = j;
        break;
      }
    }
    if (pivot < 0)
      throw ZeroDegreeEntryError("dictionary entry '" + entry.str() +
                                 "' has no variable to factor out");
    Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(N, n);
    coeff(k, pivot) = 1.0;
    out.add_term(entry.divided_by(pivot), coeff);
  }
  return out;
}

}  // namespace deltaiss::poly
