#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nxs/core/types.hpp"
#include "nxs/error.hpp"

namespace nxs {

/// Typed item buffer written by one node and read by any number of
/// downstream nodes during a single scheduler step.
class Port {
 public:
  explicit Port(PortType type);

  PortType type() const noexcept { return type_; }
  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  void clear() noexcept;

  template <class T>
  void push(T item) {
    std::get<std::vector<T>>(items_).push_back(std::move(item));
  }

  /// Items of type T; throws Errc::type_mismatch when the port carries another type.
  template <class T>
  const std::vector<T>& items() const {
    if (auto* v = std::get_if<std::vector<T>>(&items_)) return *v;
    throw Error(Errc::type_mismatch, "port of type " + std::string(to_string(type_)) + " read with wrong item type");
  }

 private:
  PortType type_;
  std::variant<std::vector<Chunk>, std::vector<Epoch>, std::vector<MarkerEvent>,
               std::vector<SpectrumFrame>, std::vector<FeatureVector>>
      items_;
};

struct InputSlot {
  std::string name;
  std::vector<PortType> accepts;
  bool optional = false;
};

struct OutputSlot {
  std::string name;
  PortType type;
};

using InputTypes = std::vector<std::optional<PortType>>;

struct StepContext {
  double now = 0.0;          // pipeline time, seconds since run start
  std::uint64_t step = 0;    // step index
};

using Counters = std::map<std::string, std::uint64_t>;

/// Base class for every pipeline node. Lifecycle: construct (parameters
/// checked) -> bind inputs -> init -> update per step -> terminate.
class Node {
 public:
  explicit Node(std::string name) : name_(std::move(name)) {}
  virtual ~Node() = default;
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  const std::string& name() const noexcept { return name_; }
  virtual std::string_view kind() const = 0;

  virtual std::vector<InputSlot> input_slots() const { return {}; }
  /// Output ports given the types feeding each input slot (nullopt when the
  /// slot is unconnected). Pass-through nodes mirror their input type.
  virtual std::vector<OutputSlot> output_slots(const InputTypes& inputs) const = 0;

  virtual void init() {}
  virtual void update(const StepContext& ctx) = 0;
  virtual void terminate() {}

  /// True once a finite source has delivered everything it ever will.
  virtual bool exhausted() const { return false; }
  virtual Counters counters() const { return {}; }

  // Wiring, driven by Pipeline.
  void bind_input(std::size_t slot, const Port* port);
  void create_outputs();
  std::size_t output_index(std::string_view port_name) const;  // npos if unknown; valid after create_outputs
  Port& output(std::size_t slot = 0);
  const Port& output(std::size_t slot = 0) const;
  std::size_t output_count() const noexcept { return outputs_.size(); }
  void clear_outputs() noexcept;

 protected:
  /// Bound input port, or nullptr for an unconnected optional slot.
  const Port* input(std::size_t slot) const;
  std::optional<PortType> input_type(std::size_t slot) const;

 private:
  std::string name_;
  std::vector<const Port*> inputs_;
  std::vector<Port> outputs_;
  std::vector<std::string> output_names_;
};

}  // namespace nxs
