#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nxs/core/node.hpp"
#include "nxs/core/params.hpp"

namespace nxs {

struct ParamSpec {
  std::string name;
  std::string type;           // human-readable, e.g. "float", "list<string>"
  std::string default_value;  // empty when required
  std::string help;
  bool required = false;
};

struct BuildContext {
  std::filesystem::path base_dir;  // relative file parameters resolve against this

  std::filesystem::path resolve(const std::string& file) const;
};

using NodeFactory =
    std::function<std::unique_ptr<Node>(const std::string& name, const ParamSet& params, const BuildContext& ctx)>;

struct NodeKind {
  std::string kind;
  std::string summary;
  std::vector<ParamSpec> params;
  NodeFactory factory;
};

/// Maps node kind names to factories and parameter schemas. The CLI help and
/// the pipeline parser's unknown-key warnings are generated from it.
class NodeRegistry {
 public:
  void add(NodeKind kind);
  const NodeKind* find(std::string_view kind) const;
  std::vector<const NodeKind*> kinds() const;  // sorted by name

  /// Closest registered kind by edit distance (empty if nothing is close).
  std::string nearest(std::string_view kind) const;

  std::string help_text() const;

  /// Registry with every built-in node kind.
  static const NodeRegistry& builtin();

 private:
  std::vector<NodeKind> kinds_;
};

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace nxs
