#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace deltaiss::tools {

// Minimal TOML-style config reader: [sections], key = value pairs, where a
// value is a quoted string, number, boolean, or (possibly nested) array.
// Enough for run configs; not a general TOML implementation.
class TomlValue {
 public:
  using Array = std::vector<TomlValue>;
  using Storage = std::variant<double, bool, std::string, Array>;

  TomlValue() : storage_(0.0) {}
  explicit TomlValue(Storage s) : storage_(std::move(s)) {}

  bool is_number() const { return std::holds_alternative<double>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_string() const { return std::holds_alternative<std::string>(storage_); }
  bool is_array() const { return std::holds_alternative<Array>(storage_); }

  double as_number(const std::string& where) const;
  bool as_bool(const std::string& where) const;
  const std::string& as_string(const std::string& where) const;
  const Array& as_array(const std::string& where) const;

 private:
  Storage storage_;
};

class TomlDocument {
 public:
  static TomlDocument parse_string(const std::string& text, const std::string& origin);
  static TomlDocument parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key, double fallback) const;
  double number_required(const std::string& section, const std::string& key) const;
  int integer(const std::string& section, const std::string& key, int fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  Eigen::VectorXd vector(const std::string& section, const std::string& key) const;
  Eigen::MatrixXd matrix(const std::string& section, const std::string& key) const;
  std::vector<std::vector<int>> int_rows(const std::string& section,
                                         const std::string& key) const;

 private:
  const TomlValue* find(const std::string& section, const std::string& key) const;
  const TomlValue& require(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, TomlValue>> sections_;
  std::string origin_;
};

}  // namespace deltaiss::tools
