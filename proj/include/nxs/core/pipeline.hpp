#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nxs/core/node.hpp"

namespace nxs {

/// Reference to an output port: "node" (first output) or "node:port".
struct PortRef {
  std::string node;
  std::string port;

  static PortRef parse(const std::string& text);
  std::string to_string() const { return port.empty() ? node : node + ":" + port; }
};

enum class Severity { error, warning };

struct ValidationIssue {
  Severity severity = Severity::error;
  Errc kind = Errc::type_mismatch;
  std::string node;
  std::string message;
  std::vector<std::string> path;  // populated for CycleDetected
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;
  std::size_t error_count() const;
};

struct StepReport {
  std::vector<double> node_seconds;  // per node, instantiation order
  double total_seconds = 0.0;
};

/// When run() stops. Any satisfied condition ends the loop.
struct Termination {
  std::optional<std::uint64_t> max_steps;
  std::optional<double> duration;  // pipeline seconds
  bool until_exhausted = false;    // stop once every finite source is drained
  bool paced = true;               // false: virtual clock, no sleeping
  const std::atomic<bool>* interrupt = nullptr;
};

struct RunReport {
  std::uint64_t step_count = 0;
  std::uint64_t overruns = 0;
  double elapsed = 0.0;        // wall seconds
  double pipeline_time = 0.0;  // clock value of the last step
  double mean_latency = 0.0;
  double max_latency = 0.0;
  std::vector<double> latencies;
  bool failed = false;
  std::string failed_node;
  std::string failure;
  std::map<std::string, Counters> node_counters;

  double percentile_latency(double p) const;
  double overrun_rate() const;
};

/// Ordered node graph executed by a single-threaded cooperative loop.
/// Update order is instantiation order.
class Pipeline {
 public:
  explicit Pipeline(double loop_period = 0.01);
  ~Pipeline();
  Pipeline(Pipeline&&) noexcept;
  Pipeline& operator=(Pipeline&&) noexcept;

  Node& add(std::unique_ptr<Node> node, const std::vector<PortRef>& inputs = {});

  template <class N, class... Args>
  N& emplace(const std::vector<PortRef>& inputs, Args&&... args) {
    auto node = std::make_unique<N>(std::forward<Args>(args)...);
    N& ref = *node;
    add(std::move(node), inputs);
    return ref;
  }

  /// Binds `from` to input slot `slot` of `consumer`. Edge declaration order
  /// does not matter; only slots and node order do.
  void connect(const PortRef& from, const std::string& consumer, std::size_t slot);

  double loop_period() const noexcept { return loop_period_; }
  void set_loop_period(double seconds);

  std::size_t size() const noexcept { return entries_.size(); }
  Node& node(std::size_t i) { return *entries_.at(i).node; }
  Node* find(const std::string& name);

  ValidationReport validate() const;

  /// Validates (throwing the first error), wires ports and calls init on
  /// every node in order.
  void initialize();
  bool initialized() const noexcept { return initialized_; }

  /// One scheduler iteration: clear all ports, update every node once.
  /// A throwing node aborts the step, terminates all nodes and rethrows as
  /// Errc::node_failure.
  StepReport step(double now);

  RunReport run(const Termination& termination);

  /// Calls terminate on every node in reverse order; idempotent.
  void terminate();

  const std::string& failed_node() const noexcept { return failed_node_; }

 private:
  struct Entry {
    std::unique_ptr<Node> node;
    std::vector<std::optional<PortRef>> inputs;  // by slot
  };

  std::size_t index_of(const std::string& name) const;

  double loop_period_;
  std::vector<Entry> entries_;
  bool initialized_ = false;
  bool terminated_ = false;
  std::uint64_t steps_ = 0;
  std::string failed_node_;
};

}  // namespace nxs
