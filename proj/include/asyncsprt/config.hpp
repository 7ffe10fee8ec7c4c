#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace asyncsprt::config {

// Parse or lookup failure; message carries "file:line" or a field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Value;
using Table = std::map<std::string, Value>;

// One manifest value: boolean, integer, float, string, homogeneous array, or
// nested table. Integers promote to doubles on numeric access.
class Value {
 public:
  Value() : v_(false) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(std::int64_t i) : v_(i) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(std::vector<Value> a) : v_(std::move(a)) {}
  explicit Value(Table t) : v_(std::move(t)) {}

  bool is_table() const { return std::holds_alternative<Table>(v_); }
  bool is_array() const { return std::holds_alternative<std::vector<Value>>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(v_) || std::holds_alternative<double>(v_);
  }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_boolean() const { return std::holds_alternative<bool>(v_); }

  double as_double(const std::string& path) const;
  std::int64_t as_integer(const std::string& path) const;
  bool as_boolean(const std::string& path) const;
  const std::string& as_string(const std::string& path) const;
  const std::vector<Value>& as_array(const std::string& path) const;
  const Table& as_table(const std::string& path) const;
  Table& as_table(const std::string& path);

 private:
  std::variant<bool, std::int64_t, double, std::string, std::vector<Value>, Table> v_;
};

// Grammar (documented in the README): '#' comments, [table.subtable]
// headers, key = value lines, values are strings, booleans, numbers, or
// single-line arrays.
Table parse_string(const std::string& text, const std::string& source_name = "<string>");
Table parse_file(const std::string& path);

// dotted-path lookup; nullptr when any component is missing
const Value* find(const Table& root, const std::string& dotted_path);

// required/optional typed access; errors name the full field path
double require_double(const Table& root, const std::string& path);
std::int64_t require_integer(const Table& root, const std::string& path);
const std::string& require_string(const Table& root, const std::string& path);
std::vector<double> require_double_array(const Table& root, const std::string& path);

double get_double(const Table& root, const std::string& path, double fallback);
std::int64_t get_integer(const Table& root, const std::string& path, std::int64_t fallback);
std::string get_string(const Table& root, const std::string& path, std::string fallback);

}  // namespace asyncsprt::config
