#include "nxs/dsl/pipeline_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nxs/dsl/toml.hpp"

namespace nxs::dsl {

namespace {

std::vector<PortRef> parse_inputs(const Value& v, int line) {
  std::vector<PortRef> refs;
  try {
    if (v.is_string()) {
      refs.push_back(PortRef::parse(v.as_string()));
    } else {
      for (const auto& item : v.as_list()) refs.push_back(PortRef::parse(item.as_string()));
    }
  } catch (const Error&) {
    throw SyntaxError(line, 1, "'input' must be a node name or a list of node names");
  }
  return refs;
}

}  // namespace

PipelineSpec parse_pipeline(std::string_view text, const NodeRegistry& registry) {
  const TomlDocument doc = parse_toml(text);
  PipelineSpec spec;

  for (const auto& table : doc.tables) {
    if (table.path.empty()) {
      for (const auto& [key, value] : table.entries) {
        spec.warnings.push_back("ignoring top-level key '" + key + "'");
      }
      continue;
    }
    if (table.path.size() == 1 && table.path[0] == "pipeline") {
      for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& [key, value] = table.entries[i];
        if (key == "loop_period") {
          if (!value.is_number() || !(value.as_double() > 0.0)) {
            throw SyntaxError(table.entry_lines[i], 1, "loop_period must be a positive number");
          }
          spec.loop_period = value.as_double();
        } else {
          spec.warnings.push_back("[pipeline]: unknown key '" + key + "'");
        }
      }
      continue;
    }
    if (table.path.size() != 2 || table.path[0] != "node") {
      std::string name;
      for (const auto& p : table.path) name += (name.empty() ? "" : ".") + p;
      spec.warnings.push_back("ignoring table [" + name + "] (line " + std::to_string(table.line) + ")");
      continue;
    }

    NodeDecl decl;
    decl.name = table.path[1];
    decl.line = table.line;
    const Value* kind = table.find("kind");
    if (!kind || !kind->is_string()) {
      throw SyntaxError(table.line, 1, "node '" + decl.name + "' needs a string 'kind'");
    }
    decl.kind = kind->as_string();
    const NodeKind* info = registry.find(decl.kind);
    if (!info) {
      std::string msg = "'" + decl.kind + "' (node '" + decl.name + "', line " + std::to_string(table.line) + ")";
      const auto hint = registry.nearest(decl.kind);
      if (!hint.empty()) msg += "; did you mean '" + hint + "'?";
      throw Error(Errc::unknown_node_kind, msg);
    }
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      const auto& [key, value] = table.entries[i];
      if (key == "kind") continue;
      if (key == "input") {
        decl.inputs = parse_inputs(value, table.entry_lines[i]);
        continue;
      }
      const bool known = std::any_of(info->params.begin(), info->params.end(),
                                     [&](const ParamSpec& p) { return p.name == key; });
      if (!known) {
        spec.warnings.push_back("node '" + decl.name + "' (" + decl.kind + "): unknown parameter '" + key +
                                "' (line " + std::to_string(table.entry_lines[i]) + ")");
      }
      decl.params.set(key, value);
    }
    spec.nodes.push_back(std::move(decl));
  }
  if (spec.nodes.empty()) throw SyntaxError(1, 1, "pipeline declares no nodes");
  return spec;
}

PipelineSpec load_pipeline_file(const std::filesystem::path& path, const NodeRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pipeline(buf.str(), registry);
}

Pipeline build_pipeline(const PipelineSpec& spec, const BuildContext& ctx, const NodeRegistry& registry) {
  Pipeline pipeline(spec.loop_period);
  for (const auto& decl : spec.nodes) {
    const NodeKind* info = registry.find(decl.kind);
    if (!info) throw Error(Errc::unknown_node_kind, decl.kind);
    for (const auto& p : info->params) {
      if (p.required && !decl.params.has(p.name)) {
        throw Error(Errc::invalid_parameter,
                    "node '" + decl.name + "' (" + decl.kind + "): missing required parameter '" + p.name + "'");
      }
    }
    std::unique_ptr<Node> node;
    try {
      node = info->factory(decl.name, decl.params, ctx);
    } catch (const Error& e) {
      throw Error(e.code(), "node '" + decl.name + "' (" + decl.kind + "): " + e.detail());
    }
    pipeline.add(std::move(node), decl.inputs);
  }
  return pipeline;
}

}  // namespace nxs::dsl
