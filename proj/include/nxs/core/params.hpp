#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nxs {

/// A node parameter value: scalar, string or (nested) list.
class Value {
 public:
  using List = std::vector<Value>;
  using Storage = std::variant<bool, std::int64_t, double, std::string, List>;

  Value() : v_(std::int64_t{0}) {}
  Value(bool b) : v_(b) {}
  Value(int i) : v_(std::int64_t{i}) {}
  Value(std::int64_t i) : v_(i) {}
  Value(double d) : v_(d) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(List l) : v_(std::move(l)) {}

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_number() const { return is_int() || std::holds_alternative<double>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_list() const { return std::holds_alternative<List>(v_); }

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;
  const std::string& as_string() const;
  const List& as_list() const;

  std::string type_name() const;
  std::string to_string() const;

  const Storage& storage() const { return v_; }
  bool operator==(const Value&) const = default;

 private:
  Storage v_;
};

/// Channel selector: a name or a zero-based index.
using ChannelSelector = std::variant<std::string, std::size_t>;

/// Parameters of one node declaration, with typed accessors. Accessors throw
/// Errc::invalid_parameter naming the key on a type or range problem.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::map<std::string, Value> values) : values_(std::move(values)) {}

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, Value>& values() const { return values_; }

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> get_strings(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::vector<double>> get_matrix(const std::string& key) const;
  std::vector<ChannelSelector> get_selectors(const std::string& key) const;
  ChannelSelector get_selector(const std::string& key) const;

 private:
  const Value& require(const std::string& key) const;
  std::map<std::string, Value> values_;
};

}  // namespace nxs
