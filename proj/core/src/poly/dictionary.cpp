#include "deltaiss/poly/dictionary.hpp"

#include <algorithm>

#include "deltaiss/errors.hpp"

namespace deltaiss::poly {

namespace {

void compositions(int n, int remaining, std::vector<int>& current,
                  std::vector<Monomial>& out) {
  const int pos = static_cast<int>(current.size());
  if (pos == n - 1) {
    current.push_back(remaining);
    out.emplace_back(current);
    current.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current.push_back(e);
    compositions(n, remaining - e, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<Monomial> monomial_basis(int n, int d_min, int d_max) {
  if (n < 1) throw DimensionError("state dimension must be >= 1");
  if (d_min < 0 || d_min > d_max)
    throw InvalidDegreeRangeError("require 0 <= d_min <= d_max");
  std::vector<Monomial> out;
  std::vector<int> current;
  for (int d = d_min; d <= d_max; ++d) compositions(n, d, current, out);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

MonomialDictionary::MonomialDictionary(int n, std::vector<Monomial> sorted_entries)
    : n_(n), entries_(std::move(sorted_entries)) {}

MonomialDictionary MonomialDictionary::enumerate(int n, int d_min, int d_max) {
  if (d_min < 1) throw InvalidDegreeRangeError("dictionary entries need degree >= 1");
  return MonomialDictionary(n, monomial_basis(n, d_min, d_max));
}

MonomialDictionary MonomialDictionary::from_entries(int n, std::vector<Monomial> entries) {
  if (n < 1) throw DimensionError("state dimension must be >= 1");
  if (entries.empty()) throw InvalidDegreeRangeError("dictionary must be non-empty");
  for (const auto& m : entries) {
    if (m.nvars() != n) throw DimensionError("dictionary entry has wrong variable count");
    if (m.degree() < 1)
      throw ZeroDegreeEntryError("dictionary entry '" + m.str() + "' has degree 0");
  }
  std::sort(entries.begin(), entries.end(), GrlexLess{});
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i] == entries[i - 1])
      throw InvalidDegreeRangeError("duplicate dictionary entry '" + entries[i].str() + "'");
  return MonomialDictionary(n, std::move(entries));
}

int MonomialDictionary::max_degree() const {
  int d = 0;
  for (const auto& m : entries_) d = std::max(d, m.degree());
  return d;
}

Eigen::VectorXd MonomialDictionary::evaluate(const Eigen::VectorXd& point) const {
  if (point.size() != n_) throw DimensionError("point dimension does not match dictionary");
  Eigen::VectorXd v(size());
  for (int k = 0; k < size(); ++k) v(k) = entries_[static_cast<std::size_t>(k)].evaluate(point);
  return v;
}

json MonomialDictionary::to_json() const {
  json a = json::array();
  for (const auto& m : entries_) a.push_back(m.to_json());
  return a;
}

MonomialDictionary MonomialDictionary::from_json(const json& j) {
  std::vector<Monomial> entries;
  for (const auto& e : j) entries.push_back(Monomial::from_json(e));
  if (entries.empty()) throw IoError("empty dictionary JSON");
  const int nvars = entries.front().nvars();
  return from_entries(nvars, std::move(entries));
}

}  // namespace deltaiss::poly
