#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nxs/core/pipeline.hpp"
#include "nxs/core/registry.hpp"

namespace nxs::dsl {

struct NodeDecl {
  std::string name;
  std::string kind;
  std::vector<PortRef> inputs;
  ParamSet params;
  int line = 0;
};

struct PipelineSpec {
  double loop_period = 0.01;
  std::vector<NodeDecl> nodes;  // declaration order == instantiation order
  std::vector<std::string> warnings;
};

/// Parses a pipeline description:
///
///   [pipeline]
///   loop_period = 0.01
///
///   [node.src]
///   kind = "Generator"
///   mode = "oscillator"
///
///   [node.filt]
///   kind = "ButterFilter"
///   input = "src"            # or ["a", "b:markers"]
///   lowcut = 8
///
/// Throws SyntaxError, Errc::unknown_node_kind (with a "did you mean" hint)
/// or Errc::duplicate_node_name. Unknown parameter keys become warnings.
PipelineSpec parse_pipeline(std::string_view text, const NodeRegistry& registry = NodeRegistry::builtin());

/// Reads and parses a pipeline file; Errc::io_error if unreadable.
PipelineSpec load_pipeline_file(const std::filesystem::path& path,
                                const NodeRegistry& registry = NodeRegistry::builtin());

/// Instantiates every node (parameters are checked by the factories, which
/// throw Errc::invalid_parameter and friends) and records the edges.
Pipeline build_pipeline(const PipelineSpec& spec, const BuildContext& ctx = {},
                        const NodeRegistry& registry = NodeRegistry::builtin());

}  // namespace nxs::dsl
