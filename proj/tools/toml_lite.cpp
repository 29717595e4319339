#include "toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "deltaiss/errors.hpp"

namespace deltaiss::tools {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  std::string origin;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char next() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  void skip_ws_and_comments() {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        next();
      } else if (c == '#') {
        while (!done() && peek() != '\n') ++pos;
      } else {
        break;
      }
    }
  }
};

TomlValue parse_value(Cursor& cur);

TomlValue parse_array(Cursor& cur) {
  cur.next();  // consume '['
  TomlValue::Array items;
  cur.skip_ws_and_comments();
  if (!cur.done() && cur.peek() == ']') {
    cur.next();
    return TomlValue(std::move(items));
  }
  while (true) {
    cur.skip_ws_and_comments();
    items.push_back(parse_value(cur));
    cur.skip_ws_and_comments();
    if (cur.done()) cur.fail("unterminated array");
    const char c = cur.next();
    if (c == ']') break;
    if (c != ',') cur.fail("expected ',' or ']' in array");
  }
  return TomlValue(std::move(items));
}

TomlValue parse_value(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) cur.fail("missing value");
  const char c = cur.peek();
  if (c == '[') return parse_array(cur);
  if (c == '"') {
    cur.next();
    std::string s;
    while (!cur.done() && cur.peek() != '"') s += cur.next();
    if (cur.done()) cur.fail("unterminated string");
    cur.next();
    return TomlValue(TomlValue::Storage{std::move(s)});
  }
  std::string token;
  while (!cur.done()) {
    const char t = cur.peek();
    if (t == ',' || t == ']' || t == '\n' || t == '#' || t == ' ' || t == '\t' || t == '\r')
      break;
    token += cur.next();
  }
  if (token == "true") return TomlValue(TomlValue::Storage{true});
  if (token == "false") return TomlValue(TomlValue::Storage{false});
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) cur.fail("malformed number '" + token + "'");
    return TomlValue(TomlValue::Storage{v});
  } catch (const std::exception&) {
    cur.fail("cannot parse value '" + token + "'");
  }
}

}  // namespace

double TomlValue::as_number(const std::string& where) const {
  if (!is_number()) throw ConfigError(where + ": expected a number");
  return std::get<double>(storage_);
}

bool TomlValue::as_bool(const std::string& where) const {
  if (!is_bool()) throw ConfigError(where + ": expected a boolean");
  return std::get<bool>(storage_);
}

const std::string& TomlValue::as_string(const std::string& where) const {
  if (!is_string()) throw ConfigError(where + ": expected a string");
  return std::get<std::string>(storage_);
}

const TomlValue::Array& TomlValue::as_array(const std::string& where) const {
  if (!is_array()) throw ConfigError(where + ": expected an array");
  return std::get<Array>(storage_);
}

TomlDocument TomlDocument::parse_string(const std::string& text, const std::string& origin) {
  TomlDocument doc;
  doc.origin_ = origin;
  Cursor cur{text, 0, 1, origin};
  std::string section;
  while (true) {
    cur.skip_ws_and_comments();
    if (cur.done()) break;
    if (cur.peek() == '[') {
      cur.next();
      section.clear();
      while (!cur.done() && cur.peek() != ']') section += cur.next();
      if (cur.done()) cur.fail("unterminated section header");
      cur.next();
      continue;
    }
    std::string key;
    while (!cur.done() && (std::isalnum(static_cast<unsigned char>(cur.peek())) ||
                           cur.peek() == '_' || cur.peek() == '-'))
      key += cur.next();
    if (key.empty()) cur.fail("expected a key");
    cur.skip_ws_inline();
    if (cur.done() || cur.next() != '=') cur.fail("expected '=' after key '" + key + "'");
    doc.sections_[section][key] = parse_value(cur);
  }
  return doc;
}

TomlDocument TomlDocument::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

const TomlValue* TomlDocument::find(const std::string& section, const std::string& key) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  return &kit->second;
}

const TomlValue& TomlDocument::require(const std::string& section,
                                       const std::string& key) const {
  const TomlValue* v = find(section, key);
  if (v == nullptr)
    throw ConfigError(origin_ + ": missing required key [" + section + "] " + key);
  return *v;
}

bool TomlDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

double TomlDocument::number(const std::string& section, const std::string& key,
                            double fallback) const {
  const TomlValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_number("[" + section + "] " + key);
}

double TomlDocument::number_required(const std::string& section, const std::string& key) const {
  return require(section, key).as_number("[" + section + "] " + key);
}

int TomlDocument::integer(const std::string& section, const std::string& key,
                          int fallback) const {
  return static_cast<int>(number(section, key, fallback));
}

bool TomlDocument::boolean(const std::string& section, const std::string& key,
                           bool fallback) const {
  const TomlValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_bool("[" + section + "] " + key);
}

std::string TomlDocument::text(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const TomlValue* v = find(section, key);
  return v == nullptr ? fallback : v->as_string("[" + section + "] " + key);
}

Eigen::VectorXd TomlDocument::vector(const std::string& section, const std::string& key) const {
  const auto& arr = require(section, key).as_array("[" + section + "] " + key);
  Eigen::VectorXd out(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = arr[i].as_number("[" + section + "] " + key);
  return out;
}

Eigen::MatrixXd TomlDocument::matrix(const std::string& section, const std::string& key) const {
  const std::string where = "[" + section + "] " + key;
  const auto& rows = require(section, key).as_array(where);
  if (rows.empty()) throw ConfigError(where + ": empty matrix");
  const auto& first = rows[0].as_array(where);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(first.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i].as_array(where);
    if (row.size() != first.size()) throw ConfigError(where + ": ragged matrix");
    for (std::size_t j = 0; j < row.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].as_number(where);
  }
  return out;
}

std::vector<std::vector<int>> TomlDocument::int_rows(const std::string& section,
                                                     const std::string& key) const {
  const std::string where = "[" + section + "] " + key;
  const auto& rows = require(section, key).as_array(where);
  std::vector<std::vector<int>> out;
  for (const auto& r : rows) {
    const auto& row = r.as_array(where);
    std::vector<int> ints;
    for (const auto& v : row) ints.push_back(static_cast<int>(v.as_number(where)));
    out.push_back(std::move(ints));
  }
  return out;
}

}  // namespace deltaiss::tools
