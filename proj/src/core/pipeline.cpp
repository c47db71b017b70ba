#include "nxs/core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "nxs/log.hpp"

namespace nxs {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}
}  // namespace

PortRef PortRef::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, ""};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(),
                                                [](const auto& i) { return i.severity == Severity::error; }));
}

double RunReport::percentile_latency(double p) const {
  if (latencies.empty()) return 0.0;
  std::vector<double> sorted = latencies;
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double RunReport::overrun_rate() const {
  return step_count == 0 ? 0.0 : static_cast<double>(overruns) / static_cast<double>(step_count);
}

Pipeline::Pipeline(double loop_period) { set_loop_period(loop_period); }

Pipeline::~Pipeline() {
  if (initialized_) terminate();
}

Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;

void Pipeline::set_loop_period(double seconds) {
  if (!(seconds > 0.0)) throw Error(Errc::invalid_parameter, "loop_period must be positive");
  loop_period_ = seconds;
}

std::size_t Pipeline::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].node->name() == name) return i;
  }
  return npos;
}

Node* Pipeline::find(const std::string& name) {
  const auto i = index_of(name);
  return i == npos ? nullptr : entries_[i].node.get();
}

Node& Pipeline::add(std::unique_ptr<Node> node, const std::vector<PortRef>& inputs) {
  if (initialized_) throw Error(Errc::invalid_parameter, "pipeline already initialized");
  if (index_of(node->name()) != npos) throw Error(Errc::duplicate_node_name, node->name());
  Entry e{std::move(node), {}};
  for (const auto& ref : inputs) e.inputs.emplace_back(ref);
  entries_.push_back(std::move(e));
  return *entries_.back().node;
}

void Pipeline::connect(const PortRef& from, const std::string& consumer, std::size_t slot) {
  const auto i = index_of(consumer);
  if (i == npos) throw Error(Errc::dangling_input, "unknown consumer '" + consumer + "'");
  auto& inputs = entries_[i].inputs;
  if (inputs.size() <= slot) inputs.resize(slot + 1);
  inputs[slot] = from;
}

ValidationReport Pipeline::validate() const {
  ValidationReport report;
  auto error = [&](Errc kind, const std::string& node, std::string msg, std::vector<std::string> path = {}) {
    report.issues.push_back({Severity::error, kind, node, std::move(msg), std::move(path)});
  };

  // Producer-of edges (consumer -> producers) for cycle search.
  std::vector<std::vector<std::size_t>> producers(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (const auto& ref : entries_[i].inputs) {
      if (!ref) continue;
      const auto j = index_of(ref->node);
      if (j != npos) producers[i].push_back(j);
    }
  }
  // Path from `start` back through producers to `target`, if any.
  auto find_path = [&](std::size_t start, std::size_t target) {
    std::vector<std::size_t> path;
    std::vector<bool> seen(entries_.size(), false);
    std::function<bool(std::size_t)> dfs = [&](std::size_t at) {
      path.push_back(at);
      if (at == target) return true;
      seen[at] = true;
      for (auto p : producers[at]) {
        if (!seen[p] && dfs(p)) return true;
      }
      path.pop_back();
      return false;
    };
    dfs(start);
    return path;
  };

  std::vector<std::vector<OutputSlot>> outputs(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Node& node = *entries_[i].node;
    const auto slots = node.input_slots();
    const auto& refs = entries_[i].inputs;
    InputTypes types(slots.size());

    if (refs.size() > slots.size()) {
      error(Errc::input_arity, node.name(),
            node.name() + " (" + std::string(node.kind()) + ") accepts " + std::to_string(slots.size()) +
                " input(s), " + std::to_string(refs.size()) + " given");
    }
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto& slot = slots[s];
      if (s >= refs.size() || !refs[s]) {
        if (!slot.optional) {
          error(Errc::dangling_input, node.name(), node.name() + ": input '" + slot.name + "' is not connected");
        }
        continue;
      }
      const PortRef& ref = *refs[s];
      const auto j = index_of(ref.node);
      if (j == npos) {
        error(Errc::dangling_input, node.name(),
              node.name() + ": input references unknown node '" + ref.node + "'");
        continue;
      }
      if (j >= i) {
        auto path = find_path(j, i);
        if (!path.empty()) {
          std::vector<std::string> names;
          names.push_back(node.name());
          for (auto p : path) names.push_back(entries_[p].node->name());
          std::string text;
          for (const auto& n : names) text += (text.empty() ? "" : " <- ") + n;
          error(Errc::cycle_detected, node.name(), "cycle: " + text, names);
        } else {
          error(Errc::order_violation, node.name(),
                node.name() + " consumes '" + ref.node + "' which is instantiated after it");
        }
        continue;
      }
      const auto& produced = outputs[j];
      if (produced.empty()) {
        error(Errc::type_mismatch, node.name(), ref.node + " has no output port (feeding " + node.name() + ")");
        continue;
      }
      std::size_t port = 0;
      if (!ref.port.empty()) {
        port = npos;
        for (std::size_t k = 0; k < produced.size(); ++k) {
          if (produced[k].name == ref.port) port = k;
        }
        if (port == npos) {
          error(Errc::dangling_input, node.name(),
                node.name() + ": node '" + ref.node + "' has no output port '" + ref.port + "'");
          continue;
        }
      }
      const PortType type = produced[port].type;
      if (std::find(slot.accepts.begin(), slot.accepts.end(), type) == slot.accepts.end()) {
        const bool epoch_only = slot.accepts.size() == 1 && slot.accepts[0] == PortType::epoch;
        std::string expected;
        for (auto t : slot.accepts) expected += (expected.empty() ? "" : "|") + std::string(to_string(t));
        error(epoch_only ? Errc::epoch_context_violation : Errc::type_mismatch, node.name(),
              ref.to_string() + " (" + std::string(to_string(type)) + ") -> " + node.name() + "." + slot.name +
                  " (" + expected + ")" +
                  (epoch_only ? ": node only processes epoched data; place it after an epoching node" : ""));
        continue;
      }
      types[s] = type;
    }
    outputs[i] = node.output_slots(types);
  }
  return report;
}

void Pipeline::initialize() {
  if (initialized_) return;
  const auto report = validate();
  for (const auto& issue : report.issues) {
    if (issue.severity == Severity::error) throw Error(issue.kind, issue.message);
  }
  for (auto& entry : entries_) {
    for (std::size_t s = 0; s < entry.inputs.size(); ++s) {
      if (!entry.inputs[s]) continue;
      Node& producer = *entries_[index_of(entry.inputs[s]->node)].node;
      const auto& port_name = entry.inputs[s]->port;
      const std::size_t port = port_name.empty() ? 0 : producer.output_index(port_name);
      entry.node->bind_input(s, &producer.output(port));
    }
    entry.node->create_outputs();
  }
  for (auto& entry : entries_) entry.node->init();
  initialized_ = true;
  terminated_ = false;
}

StepReport Pipeline::step(double now) {
  if (!initialized_) throw Error(Errc::invalid_parameter, "pipeline not initialized");
  if (terminated_) throw Error(Errc::invalid_parameter, "pipeline already terminated");
  StepReport report;
  report.node_seconds.reserve(entries_.size());
  for (auto& entry : entries_) entry.node->clear_outputs();
  const StepContext ctx{now, steps_++};
  const auto t0 = SteadyClock::now();
  for (auto& entry : entries_) {
    const auto tn = SteadyClock::now();
    try {
      entry.node->update(ctx);
    } catch (const std::exception& e) {
      failed_node_ = entry.node->name();
      logger().error("node '{}' failed: {}", failed_node_, e.what());
      terminate();
      throw Error(Errc::node_failure, failed_node_ + ": " + e.what());
    }
    report.node_seconds.push_back(seconds_since(tn));
  }
  report.total_seconds = seconds_since(t0);
  return report;
}

RunReport Pipeline::run(const Termination& term) {
  RunReport report;
  initialize();
  std::vector<Node*> sources;
  for (auto& entry : entries_) {
    if (entry.node->input_slots().empty()) sources.push_back(entry.node.get());
  }
  const auto start = SteadyClock::now();
  constexpr double kSlack = 1e-9;
  double latency_sum = 0.0;
  for (std::uint64_t k = 0;; ++k) {
    if (term.interrupt && term.interrupt->load()) break;
    if (term.max_steps && k >= *term.max_steps) break;
    const double scheduled = static_cast<double>(k + 1) * loop_period_;
    if (term.duration && scheduled > *term.duration + kSlack) break;

    double now = scheduled;
    if (term.paced) {
      std::this_thread::sleep_until(start + std::chrono::duration_cast<SteadyClock::duration>(
                                                std::chrono::duration<double>(scheduled)));
      now = seconds_since(start);
    }
    try {
      const auto step_report = step(now);
      const double dt = step_report.total_seconds;
      report.latencies.push_back(dt);
      latency_sum += dt;
      report.max_latency = std::max(report.max_latency, dt);
      if (dt > loop_period_) ++report.overruns;
    } catch (const Error& e) {
      report.failed = true;
      report.failed_node = failed_node_;
      report.failure = e.what();
      report.step_count = k + 1;
      break;
    }
    report.step_count = k + 1;
    report.pipeline_time = now;
    if (term.until_exhausted && !sources.empty() &&
        std::all_of(sources.begin(), sources.end(), [](Node* n) { return n->exhausted(); })) {
      break;
    }
  }
  report.elapsed = seconds_since(start);
  if (!report.latencies.empty()) report.mean_latency = latency_sum / static_cast<double>(report.latencies.size());
  for (auto& entry : entries_) report.node_counters[entry.node->name()] = entry.node->counters();
  terminate();
  return report;
}

void Pipeline::terminate() {
  if (terminated_ || !initialized_) return;
  terminated_ = true;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    try {
      it->node->terminate();
    } catch (const std::exception& e) {
      logger().error("terminate of '{}' failed: {}", it->node->name(), e.what());
    }
  }
}

}  // namespace nxs
