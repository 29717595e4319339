#include "deltaiss/poly/monomial.hpp"

#include <numeric>

#include "deltaiss/errors.hpp"

namespace deltaiss::poly {

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_)
    if (e < 0) throw InvalidDegreeRangeError("monomial exponents must be non-negative");
}

Monomial Monomial::constant(int nvars) { return Monomial(std::vector<int>(static_cast<std::size_t>(nvars), 0)); }

Monomial Monomial::variable(int nvars, int index) {
  if (index < 0 || index >= nvars) throw DimensionError("variable index out of range");
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  e[static_cast<std::size_t>(index)] = 1;
  return Monomial(std::move(e));
}

int Monomial::degree() const { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }

double Monomial::evaluate(const Eigen::VectorXd& point) const {
  if (point.size() != static_cast<Eigen::Index>(exponents_.size()))
    throw DimensionError("point dimension does not match monomial variable count");
  double v = 1.0;
  for (std::size_t i = 0; i < exponents_.size(); ++i)
    for (int k = 0; k < exponents_[i]; ++k) v *= point(static_cast<Eigen::Index>(i));
  return v;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.nvars() != nvars()) throw DimensionError("monomial variable counts differ");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return Monomial(std::move(e));
}

Monomial Monomial::divided_by(int var_index) const {
  if (var_index < 0 || var_index >= nvars()) throw DimensionError("variable index out of range");
  if (exponents_[static_cast<std::size_t>(var_index)] <= 0)
    throw ZeroDegreeEntryError("cannot divide monomial by absent variable");
  std::vector<int> e(exponents_);
  e[static_cast<std::size_t>(var_index)] -= 1;
  return Monomial(std::move(e));
}

std::string Monomial::str() const {
  std::string out;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "x" + std::to_string(i + 1);
    if (exponents_[i] > 1) out += "^" + std::to_string(exponents_[i]);
  }
  return out.empty() ? "1" : out;
}

json Monomial::to_json() const {
  json a = json::array();
  for (int e : exponents_) a.push_back(e);
  return a;
}

Monomial Monomial::from_json(const json& j) {
  return Monomial(j.get<std::vector<int>>());
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // Same degree: x1-heavy monomials first.
  return a.exponents() > b.exponents();
}

}  // namespace deltaiss::poly
