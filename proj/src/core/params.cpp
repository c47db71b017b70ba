#include "nxs/core/params.hpp"

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs {

bool Value::as_bool() const {
  if (!is_bool()) throw Error(Errc::invalid_parameter, "expected boolean, got " + type_name());
  return std::get<bool>(v_);
}

std::int64_t Value::as_int() const {
  if (is_int()) return std::get<std::int64_t>(v_);
  if (std::holds_alternative<double>(v_)) {
    const double d = std::get<double>(v_);
    if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
  }
  throw Error(Errc::invalid_parameter, "expected integer, got " + type_name());
}

double Value::as_double() const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(v_));
  if (std::holds_alternative<double>(v_)) return std::get<double>(v_);
  throw Error(Errc::invalid_parameter, "expected number, got " + type_name());
}

const std::string& Value::as_string() const {
  if (!is_string()) throw Error(Errc::invalid_parameter, "expected string, got " + type_name());
  return std::get<std::string>(v_);
}

const Value::List& Value::as_list() const {
  if (!is_list()) throw Error(Errc::invalid_parameter, "expected list, got " + type_name());
  return std::get<List>(v_);
}

std::string Value::type_name() const {
  switch (v_.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "list";
  }
}

std::string Value::to_string() const {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + x + "\"";
        } else if constexpr (std::is_same_v<T, List>) {
          std::string s = "[";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) s += ", ";
            s += x[i].to_string();
          }
          return s + "]";
        } else {
          return fmt::format("{}", x);
        }
      },
      v_);
}

const Value& ParamSet::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(Errc::invalid_parameter, "missing required parameter '" + key + "'");
  return it->second;
}

namespace {
template <class F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(Errc::invalid_parameter, "parameter '" + key + "': " + e.detail());
  }
}
}  // namespace

double ParamSet::get_double(const std::string& key) const {
  return keyed(key, [&] { return require(key).as_double(); });
}
double ParamSet::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
std::int64_t ParamSet::get_int(const std::string& key) const {
  return keyed(key, [&] { return require(key).as_int(); });
}
std::int64_t ParamSet::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}
bool ParamSet::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? keyed(key, [&] { return require(key).as_bool(); }) : fallback;
}
std::string ParamSet::get_string(const std::string& key) const {
  return keyed(key, [&] { return require(key).as_string(); });
}
std::string ParamSet::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<std::string> ParamSet::get_strings(const std::string& key) const {
  return keyed(key, [&] {
    std::vector<std::string> out;
    const Value& v = require(key);
    if (v.is_string()) return std::vector<std::string>{v.as_string()};
    for (const auto& item : v.as_list()) out.push_back(item.as_string());
    return out;
  });
}

std::vector<double> ParamSet::get_doubles(const std::string& key) const {
  return keyed(key, [&] {
    std::vector<double> out;
    for (const auto& item : require(key).as_list()) out.push_back(item.as_double());
    return out;
  });
}

std::vector<std::vector<double>> ParamSet::get_matrix(const std::string& key) const {
  return keyed(key, [&] {
    std::vector<std::vector<double>> out;
    for (const auto& row : require(key).as_list()) {
      std::vector<double> r;
      for (const auto& item : row.as_list()) r.push_back(item.as_double());
      out.push_back(std::move(r));
    }
    return out;
  });
}

namespace {
ChannelSelector to_selector(const Value& v) {
  if (v.is_string()) return v.as_string();
  const std::int64_t i = v.as_int();
  if (i < 0) throw Error(Errc::invalid_parameter, "negative channel index");
  return static_cast<std::size_t>(i);
}
}  // namespace

std::vector<ChannelSelector> ParamSet::get_selectors(const std::string& key) const {
  return keyed(key, [&] {
    std::vector<ChannelSelector> out;
    const Value& v = require(key);
    if (!v.is_list()) return std::vector<ChannelSelector>{to_selector(v)};
    for (const auto& item : v.as_list()) out.push_back(to_selector(item));
    return out;
  });
}

ChannelSelector ParamSet::get_selector(const std::string& key) const {
  return keyed(key, [&] { return to_selector(require(key)); });
}

}  // namespace nxs
