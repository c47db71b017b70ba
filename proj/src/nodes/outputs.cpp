#include <algorithm>

#include <fmt/format.h>

#include "nxs/ml/features.hpp"
#include "nxs/nodes/nodes.hpp"

namespace nxs::nodes {

// ---- features and classification -------------------------------------------

FeatureAggregatorNode::FeatureAggregatorNode(std::string name, double tolerance)
    : Node(std::move(name)), tolerance_(tolerance), queues_(kMaxInputs) {
  if (!(tolerance >= 0.0)) throw Error(Errc::invalid_parameter, this->name() + ": tolerance must be >= 0");
}

std::vector<InputSlot> FeatureAggregatorNode::input_slots() const {
  std::vector<InputSlot> slots;
  for (std::size_t i = 0; i < kMaxInputs; ++i) {
    slots.push_back({"in" + std::to_string(i + 1), {PortType::vector}, i > 0});
  }
  return slots;
}

std::vector<OutputSlot> FeatureAggregatorNode::output_slots(const InputTypes&) const {
  return {{"vector", PortType::vector}};
}

void FeatureAggregatorNode::update(const StepContext&) {
  std::vector<std::size_t> connected;
  for (std::size_t i = 0; i < kMaxInputs; ++i) {
    const Port* in = input(i);
    if (!in) continue;
    connected.push_back(i);
    for (const auto& v : in->items<FeatureVector>()) queues_[i].push_back(v);
  }
  while (std::all_of(connected.begin(), connected.end(), [&](std::size_t i) { return !queues_[i].empty(); })) {
    std::vector<FeatureVector> parts;
    for (auto i : connected) {
      parts.push_back(std::move(queues_[i].front()));
      queues_[i].pop_front();
    }
    output().push(ml::aggregate_features(parts, tolerance_));
    ++emitted_;
  }
}

ClassifyNode::ClassifyNode(std::string name, ml::LdaModel model, ml::PredictMode mode)
    : Node(std::move(name)), model_(std::move(model)), mode_(mode) {}

std::vector<InputSlot> ClassifyNode::input_slots() const { return {{"input", {PortType::vector}}}; }

std::vector<OutputSlot> ClassifyNode::output_slots(const InputTypes&) const {
  return {{"vector", PortType::vector}};
}

void ClassifyNode::update(const StepContext&) {
  for (const auto& v : input(0)->items<FeatureVector>()) {
    const auto p = ml::lda_predict(model_, v.values);
    FeatureVector out;
    out.timestamp = v.timestamp;
    out.label = p.label;
    if (mode_ == ml::PredictMode::label) {
      out.values = {static_cast<double>(p.index)};
      out.names = {"class"};
    } else {
      out.values = p.probabilities;
      for (const auto& l : model_.labels) out.names.push_back("p:" + l);
    }
    ++predictions_;
    output().push(std::move(out));
  }
}

// ---- sinks -----------------------------------------------------------------

ToCsvNode::ToCsvNode(std::string name, std::filesystem::path file) : Node(std::move(name)), sink_(std::move(file)) {}

std::vector<InputSlot> ToCsvNode::input_slots() const {
  return {{"input", {PortType::signal, PortType::vector, PortType::marker}},
          {"markers", {PortType::marker}, true}};
}

void ToCsvNode::update(const StepContext&) {
  const Port* in = input(0);
  switch (in->type()) {
    case PortType::signal:
      for (const auto& c : in->items<Chunk>()) sink_.append(c);
      break;
    case PortType::vector:
      for (const auto& v : in->items<FeatureVector>()) sink_.append(v);
      break;
    case PortType::marker:
      for (const auto& m : in->items<MarkerEvent>()) {
        ++markers_;
        sink_.append(m);
      }
      break;
    default:
      throw Error(Errc::type_mismatch, name() + ": unsupported input type");
  }
  if (const Port* mk = input(1)) {
    for (const auto& m : mk->items<MarkerEvent>()) {
      ++markers_;
      sink_.append(m);
    }
  }
}

void ToCsvNode::terminate() { sink_.flush(); }

Counters ToCsvNode::counters() const { return {{"rows", sink_.rows_written()}, {"markers", markers_}}; }

BinLogNode::BinLogNode(std::string name, std::filesystem::path file)
    : Node(std::move(name)), writer_(std::move(file)) {}

std::vector<InputSlot> BinLogNode::input_slots() const { return {{"input", {PortType::signal}}}; }

void BinLogNode::update(const StepContext&) {
  for (const auto& c : input(0)->items<Chunk>()) writer_.append(c);
}

void BinLogNode::terminate() { writer_.flush(); }

// ---- network egress --------------------------------------------------------

NxSendNode::NxSendNode(std::string name, net::Transport transport, std::string host, std::uint16_t port,
                       std::string stream)
    : Node(std::move(name)), transport_(transport), host_(std::move(host)), port_(port), stream_(std::move(stream)) {
  if (port_ == 0) throw Error(Errc::invalid_parameter, this->name() + ": port must be non-zero");
  if (stream_.empty()) stream_ = this->name();
}

std::vector<InputSlot> NxSendNode::input_slots() const {
  return {{"input", {PortType::signal, PortType::vector, PortType::marker}},
          {"markers", {PortType::marker}, true}};
}

void NxSendNode::init() { sender_ = std::make_unique<net::NxSender>(transport_, host_, port_, stream_); }

void NxSendNode::update(const StepContext&) {
  if (!sender_) return;
  const Port* in = input(0);
  switch (in->type()) {
    case PortType::signal:
      for (const auto& c : in->items<Chunk>()) sender_->send(c);
      break;
    case PortType::vector:
      for (const auto& v : in->items<FeatureVector>()) {
        Chunk row;
        row.timestamps = {v.timestamp};
        row.channel_names = v.names.size() == v.values.size() ? v.names : default_channel_names(v.values.size(), "V");
        row.data.resize(1, static_cast<Eigen::Index>(v.values.size()));
        for (std::size_t k = 0; k < v.values.size(); ++k) row.data(0, static_cast<Eigen::Index>(k)) = v.values[k];
        sender_->send(row);
      }
      break;
    case PortType::marker:
      for (const auto& m : in->items<MarkerEvent>()) sender_->send(m);
      break;
    default:
      throw Error(Errc::type_mismatch, name() + ": unsupported input type");
  }
  if (const Port* mk = input(1)) {
    for (const auto& m : mk->items<MarkerEvent>()) sender_->send(m);
  }
}

Counters NxSendNode::counters() const {
  if (!sender_) return {};
  return {{"frames_sent", sender_->frames_sent()}, {"frames_failed", sender_->frames_failed()}};
}

}  // namespace nxs::nodes
