#include "nxs/core/node.hpp"

#include <algorithm>
#include <limits>

namespace nxs {

Port::Port(PortType type) : type_(type) {
  switch (type) {
    case PortType::signal: items_.emplace<std::vector<Chunk>>(); break;
    case PortType::epoch: items_.emplace<std::vector<Epoch>>(); break;
    case PortType::marker: items_.emplace<std::vector<MarkerEvent>>(); break;
    case PortType::spectrum: items_.emplace<std::vector<SpectrumFrame>>(); break;
    case PortType::vector: items_.emplace<std::vector<FeatureVector>>(); break;
  }
}

std::size_t Port::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, items_);
}

void Port::clear() noexcept {
  std::visit([](auto& v) { v.clear(); }, items_);
}

void Node::bind_input(std::size_t slot, const Port* port) {
  if (inputs_.size() <= slot) inputs_.resize(slot + 1, nullptr);
  inputs_[slot] = port;
}

void Node::create_outputs() {
  outputs_.clear();
  output_names_.clear();
  InputTypes types;
  for (const Port* p : inputs_) types.push_back(p ? std::optional<PortType>(p->type()) : std::nullopt);
  types.resize(std::max(types.size(), input_slots().size()));
  for (const auto& slot : output_slots(types)) {
    outputs_.emplace_back(slot.type);
    output_names_.push_back(slot.name);
  }
}

std::size_t Node::output_index(std::string_view port_name) const {
  for (std::size_t i = 0; i < output_names_.size(); ++i) {
    if (output_names_[i] == port_name) return i;
  }
  return std::numeric_limits<std::size_t>::max();
}

Port& Node::output(std::size_t slot) {
  if (slot >= outputs_.size()) throw Error(Errc::dangling_input, name_ + ": no output slot " + std::to_string(slot));
  return outputs_[slot];
}

const Port& Node::output(std::size_t slot) const {
  if (slot >= outputs_.size()) throw Error(Errc::dangling_input, name_ + ": no output slot " + std::to_string(slot));
  return outputs_[slot];
}

void Node::clear_outputs() noexcept {
  for (auto& p : outputs_) p.clear();
}

const Port* Node::input(std::size_t slot) const {
  return slot < inputs_.size() ? inputs_[slot] : nullptr;
}

std::optional<PortType> Node::input_type(std::size_t slot) const {
  const Port* p = input(slot);
  if (!p) return std::nullopt;
  return p->type();
}

}  // namespace nxs
