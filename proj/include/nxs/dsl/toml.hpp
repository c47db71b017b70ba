#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nxs/core/params.hpp"

namespace nxs::dsl {

/// One `[a.b]` table (or the implicit root table) with its keys in file order.
struct TomlTable {
  std::vector<std::string> path;  // empty for the root table
  int line = 0;
  std::vector<std::pair<std::string, Value>> entries;
  std::vector<int> entry_lines;

  const Value* find(std::string_view key) const;
};

struct TomlDocument {
  std::vector<TomlTable> tables;  // root first, then headers in file order
};

/// Parses the TOML subset used by pipeline files: comments, `[dotted.header]`
/// tables, `key = value` with basic/literal strings, integers, floats
/// (including inf/nan), booleans and (nested, multi-line) arrays. Arrays of
/// tables, inline tables, multi-line strings and date-times are rejected.
/// Throws Errc::syntax_error with "line L, col C" in the message; a repeated
/// `[node.X]` header raises Errc::duplicate_node_name.
TomlDocument parse_toml(std::string_view text);

}  // namespace nxs::dsl
