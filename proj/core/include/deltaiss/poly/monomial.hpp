#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "deltaiss/json_support.hpp"

namespace deltaiss::poly {

// A single monomial as an exponent vector over the state variables.
// Degree-0 monomials are legal here (they serve as the constant basis element
// of polynomial matrices); dictionaries reject them separately.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);
  static Monomial constant(int nvars);
  static Monomial variable(int nvars, int index);

  const std::vector<int>& exponents() const { return exponents_; }
  int nvars() const { return static_cast<int>(exponents_.size()); }
  int degree() const;
  bool is_constant() const { return degree() == 0; }

  double evaluate(const Eigen::VectorXd& point) const;
  Monomial operator*(const Monomial& other) const;

  // Divides by the given variable once; exponent must be positive.
  Monomial divided_by(int var_index) const;

  bool operator==(const Monomial& other) const { return exponents_ == other.exponents_; }
  bool operator!=(const Monomial& other) const { return !(*this == other); }

  std::string str() const;  // e.g. "x1^2*x3", "1" for the constant

  json to_json() const;
  static Monomial from_json(const json& j);

 private:
  std::vector<int> exponents_;
};

// Graded lexicographic order: by total degree, then lexicographically with
// x1 > x2 > ... (so x1*x2 precedes x1*x3 precedes x2^2).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

}  // namespace deltaiss::poly
