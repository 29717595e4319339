#pragma once

#include <Eigen/Dense>
#include <map>

#include "deltaiss/poly/dictionary.hpp"
#include "deltaiss/poly/monomial.hpp"

namespace deltaiss::poly {

// Matrix-valued polynomial stored as a sparse map from monomial basis
// elements to constant coefficient matrices. Canonical form: exactly-zero
// coefficient blocks are never stored.
class PolyMatrix {
 public:
  PolyMatrix(int rows, int cols, int nvars);

  static PolyMatrix constant(const Eigen::MatrixXd& value, int nvars);
  // The state itself as an n x 1 polynomial column.
  static PolyMatrix state_column(int nvars);
  // The dictionary as an N x 1 polynomial column.
  static PolyMatrix dictionary_column(const MonomialDictionary& dict);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nvars() const { return nvars_; }
  int term_count() const { return static_cast<int>(terms_.size()); }
  int degree() const;  // max total degree; 0 for the zero/constant matrix
  bool is_zero() const { return terms_.empty(); }

  const std::map<Monomial, Eigen::MatrixXd, GrlexLess>& terms() const { return terms_; }
  // Coefficient of the given monomial; zero matrix if absent.
  Eigen::MatrixXd coefficient(const Monomial& m) const;
  bool has_term(const Monomial& m) const { return terms_.count(m) > 0; }

  // Accumulates into the coefficient of `m`, dropping it if it becomes
  // exactly zero.
  void add_term(const Monomial& m, const Eigen::MatrixXd& coeff);

  PolyMatrix operator+(const PolyMatrix& other) const;
  PolyMatrix operator-(const PolyMatrix& other) const;
  PolyMatrix operator*(double scale) const;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& point) const;

  json to_json() const;
  static PolyMatrix from_json(const json& j);

 private:
  int rows_, cols_, nvars_;
  std::map<Monomial, Eigen::MatrixXd, GrlexLess> terms_;
};

// Exact coefficient-level product; term degrees add.
PolyMatrix poly_multiply(const PolyMatrix& a, const PolyMatrix& b);

// Max absolute coefficient difference over the union of both term sets.
double poly_residual(const PolyMatrix& a, const PolyMatrix& b);

}  // namespace deltaiss::poly
