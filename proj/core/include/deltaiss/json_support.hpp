#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "deltaiss/errors.hpp"

namespace deltaiss {

using json = nlohmann::json;

// Row-major flat encoding so matrices in files read like the printed matrix.
inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw IoError("matrix JSON must be an array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  if (r == 0) return Eigen::MatrixXd(0, 0);
  const auto c = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != c)
      throw IoError("ragged matrix JSON");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace deltaiss
