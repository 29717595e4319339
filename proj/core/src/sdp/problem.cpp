#include "deltaiss/sdp/problem.hpp"

#include "deltaiss/errors.hpp"

namespace deltaiss::sdp {

int SdpProblem::declare_symmetric(const std::string& name, int dim) {
  if (dim < 1) throw DimensionError("symmetric variable dimension must be positive");
  for (const auto& v : variables_)
    if (v.name == name) throw DuplicateNameError("variable '" + name + "' already declared");
  VariableInfo info{name, VariableInfo::Kind::Symmetric, dim, dim, scalar_count_};
  scalar_count_ += info.entry_count();
  variables_.push_back(std::move(info));
  return static_cast<int>(variables_.size()) - 1;
}

int SdpProblem::declare_free(const std::string& name, int rows, int cols) {
  if (rows < 1 || cols < 1) throw DimensionError("free variable dimensions must be positive");
  for (const auto& v : variables_)
    if (v.name == name) throw DuplicateNameError("variable '" + name + "' already declared");
  VariableInfo info{name, VariableInfo::Kind::Free, rows, cols, scalar_count_};
  scalar_count_ += info.entry_count();
  variables_.push_back(std::move(info));
  return static_cast<int>(variables_.size()) - 1;
}

const VariableInfo& SdpProblem::variable(int idx) const {
  if (idx < 0 || idx >= variable_count())
    throw UndeclaredVariableError("variable index " + std::to_string(idx) + " not declared");
  return variables_[static_cast<std::size_t>(idx)];
}

int SdpProblem::variable_index(const std::string& name) const {
  for (int i = 0; i < variable_count(); ++i)
    if (variables_[static_cast<std::size_t>(i)].name == name) return i;
  throw UndeclaredVariableError("variable '" + name + "' not declared");
}

void SdpProblem::check_term(const LinearTerm& t) const {
  const auto& v = variable(t.variable);
  if (t.entry < 0 || t.entry >= v.entry_count())
    throw DimensionError("entry index " + std::to_string(t.entry) + " out of range for '" +
                         v.name + "'");
}

void SdpProblem::add_equality(std::vector<LinearTerm> terms, double rhs) {
  for (const auto& t : terms) check_term(t);
  equalities_.push_back(EqualityRow{std::move(terms), rhs});
}

void SdpProblem::add_lmi(LmiBlock block) {
  if (block.dim < 1) throw DimensionError("LMI block dimension must be positive");
  if (block.constant.rows() != block.dim || block.constant.cols() != block.dim)
    throw DimensionError("LMI constant must be " + std::to_string(block.dim) + "x" +
                         std::to_string(block.dim));
  block.constant = 0.5 * (block.constant + block.constant.transpose()).eval();
  for (auto& t : block.terms) {
    check_term(LinearTerm{t.variable, t.entry, 1.0});
    if (t.coeff.rows() != block.dim || t.coeff.cols() != block.dim)
      throw DimensionError("LMI term coefficient has wrong dimension");
    t.coeff = 0.5 * (t.coeff + t.coeff.transpose()).eval();
  }
  lmi_blocks_.push_back(std::move(block));
}

void SdpProblem::add_psd_floor(const std::string& name, double margin) {
  const int idx = variable_index(name);
  if (variable(idx).kind != VariableInfo::Kind::Symmetric)
    throw DimensionError("PSD floor requires a symmetric variable");
  if (margin < 0.0) throw ConfigError("PSD floor margin must be non-negative");
  psd_floors_.push_back(PsdFloor{idx, margin});
}

int SdpProblem::flat_index(int variable_idx, int entry) const {
  const auto& v = variable(variable_idx);
  if (entry < 0 || entry >= v.entry_count()) throw DimensionError("entry index out of range");
  return v.offset + entry;
}

int SdpProblem::sym_entry(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: row i contributes (dim - i) entries.
  return i * dim - i * (i - 1) / 2 + (j - i);
}

Eigen::MatrixXd SdpProblem::unpack(int variable_idx, const Eigen::VectorXd& flat) const {
  const auto& v = variable(variable_idx);
  if (flat.size() != scalar_count_) throw DimensionError("flat vector has wrong length");
  Eigen::MatrixXd out(v.rows, v.cols);
  if (v.kind == VariableInfo::Kind::Symmetric) {
    for (int i = 0; i < v.rows; ++i)
      for (int j = i; j < v.cols; ++j) {
        const double val = flat(v.offset + sym_entry(v.rows, i, j));
        out(i, j) = val;
        out(j, i) = val;
      }
  } else {
    for (int i = 0; i < v.rows; ++i)
      for (int j = 0; j < v.cols; ++j) out(i, j) = flat(v.offset + i * v.cols + j);
  }
  return out;
}

void SdpProblem::pack(int variable_idx, const Eigen::MatrixXd& value,
                      Eigen::VectorXd* flat) const {
  const auto& v = variable(variable_idx);
  if (value.rows() != v.rows || value.cols() != v.cols)
    throw DimensionError("packed value has wrong shape for '" + v.name + "'");
  if (flat->size() != scalar_count_) throw DimensionError("flat vector has wrong length");
  if (v.kind == VariableInfo::Kind::Symmetric) {
    for (int i = 0; i < v.rows; ++i)
      for (int j = i; j < v.cols; ++j)
        (*flat)(v.offset + sym_entry(v.rows, i, j)) = 0.5 * (value(i, j) + value(j, i));
  } else {
    for (int i = 0; i < v.rows; ++i)
      for (int j = 0; j < v.cols; ++j) (*flat)(v.offset + i * v.cols + j) = value(i, j);
  }
}

json SdpProblem::to_json() const {
  json vars = json::array();
  for (const auto& v : variables_)
    vars.push_back(json{{"name", v.name},
                        {"kind", v.kind == VariableInfo::Kind::Symmetric ? "symmetric" : "free"},
                        {"rows", v.rows},
                        {"cols", v.cols}});
  json eqs = json::array();
  for (const auto& e : equalities_) {
    json terms = json::array();
    for (const auto& t : e.terms)
      terms.push_back(json{{"variable", variables_[static_cast<std::size_t>(t.variable)].name},
                           {"entry", t.entry},
                           {"coeff", t.coeff}});
    eqs.push_back(json{{"terms", std::move(terms)}, {"rhs", e.rhs}});
  }
  json lmis = json::array();
  for (const auto& b : lmi_blocks_) {
    json terms = json::array();
    for (const auto& t : b.terms)
      terms.push_back(json{{"variable", variables_[static_cast<std::size_t>(t.variable)].name},
                           {"entry", t.entry},
                           {"coeff", matrix_to_json(t.coeff)}});
    lmis.push_back(json{{"dim", b.dim},
                        {"label", b.label},
                        {"constant", matrix_to_json(b.constant)},
                        {"terms", std::move(terms)}});
  }
  json floors = json::array();
  for (const auto& f : psd_floors_)
    floors.push_back(json{{"variable", variables_[static_cast<std::size_t>(f.variable)].name},
                          {"margin", f.margin}});
  return json{{"variables", std::move(vars)},
              {"equalities", std::move(eqs)},
              {"lmi_blocks", std::move(lmis)},
              {"psd_floors", std::move(floors)}};
}

SdpProblem SdpProblem::from_json(const json& j) {
  SdpProblem p;
  for (const auto& v : j.at("variables")) {
    const auto name = v.at("name").get<std::string>();
    if (v.at("kind").get<std::string>() == "symmetric")
      p.declare_symmetric(name, v.at("rows").get<int>());
    else
      p.declare_free(name, v.at("rows").get<int>(), v.at("cols").get<int>());
  }
  for (const auto& e : j.at("equalities")) {
    std::vector<LinearTerm> terms;
    for (const auto& t : e.at("terms"))
      terms.push_back(LinearTerm{p.variable_index(t.at("variable").get<std::string>()),
                                 t.at("entry").get<int>(), t.at("coeff").get<double>()});
    p.add_equality(std::move(terms), e.at("rhs").get<double>());
  }
  for (const auto& b : j.at("lmi_blocks")) {
    LmiBlock block;
    block.dim = b.at("dim").get<int>();
    block.label = b.value("label", std::string{});
    block.constant = matrix_from_json(b.at("constant"));
    for (const auto& t : b.at("terms"))
      block.terms.push_back(LmiTerm{p.variable_index(t.at("variable").get<std::string>()),
                                    t.at("entry").get<int>(),
                                    matrix_from_json(t.at("coeff"))});
    p.add_lmi(std::move(block));
  }
  for (const auto& f : j.at("psd_floors"))
    p.add_psd_floor(f.at("variable").get<std::string>(), f.at("margin").get<double>());
  return p;
}

}  // namespace deltaiss::sdp
