#pragma once

#include <Eigen/Dense>
#include <vector>

#include "deltaiss/poly/monomial.hpp"

namespace deltaiss::poly {

// Ordered basis of monomials with degree >= 1 (so the lifted vector vanishes
// at the origin). Canonical order is graded lexicographic regardless of how
// the dictionary was specified.
class MonomialDictionary {
 public:
  // All monomials with total degree in [d_min, d_max].
  static MonomialDictionary enumerate(int n, int d_min, int d_max);
  // Explicit entry list; entries are validated, deduped-checked and sorted.
  static MonomialDictionary from_entries(int n, std::vector<Monomial> entries);

  int state_dim() const { return n_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<Monomial>& entries() const { return entries_; }
  const Monomial& entry(int k) const { return entries_.at(static_cast<std::size_t>(k)); }
  int max_degree() const;

  Eigen::VectorXd evaluate(const Eigen::VectorXd& point) const;

  bool operator==(const MonomialDictionary& other) const {
    return n_ == other.n_ && entries_ == other.entries_;
  }

  json to_json() const;
  static MonomialDictionary from_json(const json& j);

 private:
  MonomialDictionary(int n, std::vector<Monomial> sorted_entries);
  int n_ = 0;
  std::vector<Monomial> entries_;
};

// All monomials of total degree in [d_min, d_max] in grlex order; d_min may
// be 0 (used for controller coefficient bases, not for dictionaries).
std::vector<Monomial> monomial_basis(int n, int d_min, int d_max);

}  // namespace deltaiss::poly
