#include "deltaiss/synthesis/certificate.hpp"

#include <fstream>

#include "deltaiss/errors.hpp"
#include "deltaiss/json_support.hpp"

namespace deltaiss::synthesis {

json ConditionReport::to_json() const {
  return json{{"match_primary", match_primary},
              {"match_sibling", match_sibling},
              {"drift_primary", drift_primary},
              {"drift_sibling", drift_sibling},
              {"decay_lambda_max", decay_lambda_max},
              {"theta_floor_lambda_min", theta_floor_lambda_min},
              {"metric_identity", metric_identity},
              {"tol", tol},
              {"psd_floor", psd_floor},
              {"pass", pass}};
}

ConditionReport ConditionReport::from_json(const json& j) {
  ConditionReport r;
  r.match_primary = j.at("match_primary").get<double>();
  r.match_sibling = j.at("match_sibling").get<double>();
  r.drift_primary = j.at("drift_primary").get<double>();
  r.drift_sibling = j.at("drift_sibling").get<double>();
  r.decay_lambda_max = j.at("decay_lambda_max").get<double>();
  r.theta_floor_lambda_min = j.at("theta_floor_lambda_min").get<double>();
  r.metric_identity = j.at("metric_identity").get<double>();
  r.tol = j.at("tol").get<double>();
  r.psd_floor = j.at("psd_floor").get<double>();
  r.pass = j.at("pass").get<bool>();
  return r;
}

Certificate::Certificate()
    : Y(1, 1, 1), K(1, 1, 1), dict(poly::MonomialDictionary::enumerate(1, 1, 1)) {}

double Certificate::lyapunov(const Eigen::VectorXd& x, const Eigen::VectorXd& x_tilde) const {
  const Eigen::VectorXd d = x - x_tilde;
  return d.dot(P * d);
}

json Certificate::to_json() const {
  json j{{"format", "deltaiss-certificate/1"},
         {"epsilon", epsilon},
         {"vartheta", vartheta},
         {"P", matrix_to_json(P)},
         {"Theta", matrix_to_json(theta)},
         {"Sigma", matrix_to_json(sigma)},
         {"Y", Y.to_json()},
         {"K", K.to_json()},
         {"dictionary", dict.to_json()},
         {"alpha_lower", alpha_lower},
         {"alpha_upper", alpha_upper},
         {"psd_floor", psd_floor},
         {"residual_report", residual_report.to_json()},
         {"data_fingerprint", data_fingerprint},
         {"solver_version", solver_version},
         {"solver_margin", solver_margin},
         {"row_scale", vector_to_json(row_scale)}};
  if (rho_bound.has_value())
    j["rho_bound"] = *rho_bound;
  else
    j["rho_bound"] = nullptr;
  return j;
}

Certificate Certificate::from_json(const json& j) {
  if (j.value("format", std::string{}) != "deltaiss-certificate/1")
    throw IoError("not a certificate file (missing or unknown format tag)");
  Certificate c;
  c.epsilon = j.at("epsilon").get<double>();
  c.vartheta = j.at("vartheta").get<double>();
  c.P = matrix_from_json(j.at("P"));
  c.theta = matrix_from_json(j.at("Theta"));
  c.sigma = matrix_from_json(j.at("Sigma"));
  c.Y = poly::PolyMatrix::from_json(j.at("Y"));
  c.K = poly::PolyMatrix::from_json(j.at("K"));
  c.dict = poly::MonomialDictionary::from_json(j.at("dictionary"));
  c.alpha_lower = j.at("alpha_lower").get<double>();
  c.alpha_upper = j.at("alpha_upper").get<double>();
  c.psd_floor = j.at("psd_floor").get<double>();
  c.residual_report = ConditionReport::from_json(j.at("residual_report"));
  c.data_fingerprint = j.at("data_fingerprint").get<std::string>();
  c.solver_version = j.value("solver_version", std::string{});
  c.solver_margin = j.value("solver_margin", 0.0);
  c.row_scale = vector_from_json(j.at("row_scale"));
  if (j.contains("rho_bound") && !j.at("rho_bound").is_null())
    c.rho_bound = j.at("rho_bound").get<double>();
  return c;
}

void Certificate::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write certificate to '" + file.string() + "'");
  out << to_json().dump(2) << "\n";
}

Certificate Certificate::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read certificate from '" + file.string() + "'");
  return from_json(json::parse(in));
}

}  // namespace deltaiss::synthesis
