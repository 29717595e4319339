#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "deltaiss/json_support.hpp"

namespace deltaiss::sdp {

// Structured semidefinite feasibility problem:
//   symmetric / free matrix variables,
//   scalar linear equality rows over variable entries,
//   affine symmetric blocks required negative semidefinite,
//   PSD floors  X >= margin * I  on symmetric variables.
//
// Symmetric variables expose only their upper triangle as unknowns
// (row-major over i <= j); free variables are row-major.

struct VariableInfo {
  std::string name;
  enum class Kind { Symmetric, Free } kind = Kind::Free;
  int rows = 0;
  int cols = 0;
  int offset = 0;  // first scalar unknown in the flat layout

  int entry_count() const {
    return kind == Kind::Symmetric ? rows * (rows + 1) / 2 : rows * cols;
  }
};

struct LinearTerm {
  int variable = 0;
  int entry = 0;
  double coeff = 0.0;
};

struct EqualityRow {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
};

struct LmiTerm {
  int variable = 0;
  int entry = 0;
  Eigen::MatrixXd coeff;  // symmetric, block-sized
};

struct LmiBlock {
  int dim = 0;
  Eigen::MatrixXd constant;
  std::vector<LmiTerm> terms;
  std::string label;
};

struct PsdFloor {
  int variable = 0;
  double margin = 0.0;
};

class SdpProblem {
 public:
  int declare_symmetric(const std::string& name, int dim);
  int declare_free(const std::string& name, int rows, int cols);

  void add_equality(std::vector<LinearTerm> terms, double rhs);
  void add_lmi(LmiBlock block);
  void add_psd_floor(const std::string& name, double margin);

  int variable_count() const { return static_cast<int>(variables_.size()); }
  const std::vector<VariableInfo>& variables() const { return variables_; }
  const VariableInfo& variable(int idx) const;
  int variable_index(const std::string& name) const;  // throws if unknown
  const std::vector<EqualityRow>& equalities() const { return equalities_; }
  const std::vector<LmiBlock>& lmi_blocks() const { return lmi_blocks_; }
  const std::vector<PsdFloor>& psd_floors() const { return psd_floors_; }

  // Total scalar unknowns and flat indexing helpers.
  int scalar_count() const { return scalar_count_; }
  int flat_index(int variable, int entry) const;

  // Entry <-> matrix position for symmetric variables.
  static int sym_entry(int dim, int i, int j);

  // Reassembles a full variable matrix from a flat scalar vector.
  Eigen::MatrixXd unpack(int variable, const Eigen::VectorXd& flat) const;
  // Packs a matrix into the flat vector (symmetric: upper triangle).
  void pack(int variable, const Eigen::MatrixXd& value, Eigen::VectorXd* flat) const;

  json to_json() const;
  static SdpProblem from_json(const json& j);

 private:
  void check_term(const LinearTerm& t) const;

  std::vector<VariableInfo> variables_;
  std::vector<EqualityRow> equalities_;
  std::vector<LmiBlock> lmi_blocks_;
  std::vector<PsdFloor> psd_floors_;
  int scalar_count_ = 0;
};

}  // namespace deltaiss::sdp
