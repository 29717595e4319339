#include "deltaiss/poly/poly_matrix.hpp"

#include <algorithm>

#include "deltaiss/errors.hpp"
#include "deltaiss/json_support.hpp"

namespace deltaiss::poly {

PolyMatrix::PolyMatrix(int rows, int cols, int nvars)
    : rows_(rows), cols_(cols), nvars_(nvars) {
  if (rows < 1 || cols < 1 || nvars < 1)
    throw DimensionError("PolyMatrix dimensions must be positive");
}

PolyMatrix PolyMatrix::constant(const Eigen::MatrixXd& value, int nvars) {
  PolyMatrix p(static_cast<int>(value.rows()), static_cast<int>(value.cols()), nvars);
  p.add_term(Monomial::constant(nvars), value);
  return p;
}

PolyMatrix PolyMatrix::state_column(int nvars) {
  PolyMatrix p(nvars, 1, nvars);
  for (int i = 0; i < nvars; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(nvars, 1);
    e(i, 0) = 1.0;
    p.add_term(Monomial::variable(nvars, i), e);
  }
  return p;
}

PolyMatrix PolyMatrix::dictionary_column(const MonomialDictionary& dict) {
  PolyMatrix p(dict.size(), 1, dict.state_dim());
  for (int k = 0; k < dict.size(); ++k) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dict.size(), 1);
    e(k, 0) = 1.0;
    p.add_term(dict.entry(k), e);
  }
  return p;
}

int PolyMatrix::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

Eigen::MatrixXd PolyMatrix::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  if (it == terms_.end()) return Eigen::MatrixXd::Zero(rows_, cols_);
  return it->second;
}

void PolyMatrix::add_term(const Monomial& m, const Eigen::MatrixXd& coeff) {
  if (m.nvars() != nvars_) throw DimensionError("term variable count mismatch");
  if (coeff.rows() != rows_ || coeff.cols() != cols_)
    throw DimensionError("coefficient block is " + std::to_string(coeff.rows()) + "x" +
                         std::to_string(coeff.cols()) + ", expected " +
                         std::to_string(rows_) + "x" + std::to_string(cols_));
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) it->second += coeff;
  if (it->second.isZero(0.0)) terms_.erase(it);
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || nvars_ != other.nvars_)
    throw DimensionError("PolyMatrix sum shape mismatch");
  PolyMatrix out(*this);
  for (const auto& [m, c] : other.terms_) out.add_term(m, c);
  return out;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || nvars_ != other.nvars_)
    throw DimensionError("PolyMatrix difference shape mismatch");
  PolyMatrix out(*this);
  for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
  return out;
}

PolyMatrix PolyMatrix::operator*(double scale) const {
  PolyMatrix out(rows_, cols_, nvars_);
  if (scale == 0.0) return out;
  for (const auto& [m, c] : terms_) out.add_term(m, c * scale);
  return out;
}

Eigen::MatrixXd PolyMatrix::evaluate(const Eigen::VectorXd& point) const {
  if (point.size() != nvars_) throw DimensionError("evaluation point dimension mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, cols_);
  for (const auto& [m, c] : terms_) out += m.evaluate(point) * c;
  return out;
}

json PolyMatrix::to_json() const {
  json terms = json::array();
  for (const auto& [m, c] : terms_)
    terms.push_back(json{{"exponents", m.to_json()}, {"coeff", matrix_to_json(c)}});
  return json{{"rows", rows_}, {"cols", cols_}, {"nvars", nvars_}, {"terms", terms}};
}

PolyMatrix PolyMatrix::from_json(const json& j) {
  PolyMatrix p(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("nvars").get<int>());
  for (const auto& t : j.at("terms"))
    p.add_term(Monomial::from_json(t.at("exponents")), matrix_from_json(t.at("coeff")));
  return p;
}

PolyMatrix poly_multiply(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("product shape mismatch: " + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()));
  if (a.nvars() != b.nvars()) throw DimensionError("product variable count mismatch");
  PolyMatrix out(a.rows(), b.cols(), a.nvars());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, ca * cb);
  return out;
}

double poly_residual(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nvars() != b.nvars())
    throw DimensionError("residual shape mismatch");
  double worst = 0.0;
  for (const auto& [m, c] : a.terms())
    worst = std::max(worst, (c - b.coefficient(m)).cwiseAbs().maxCoeff());
  for (const auto& [m, c] : b.terms())
    if (!a.has_term(m)) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace deltaiss::poly
