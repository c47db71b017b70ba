#include <cmath>

#include <fmt/format.h>

#include "nxs/log.hpp"
#include "nxs/nodes/nodes.hpp"

namespace nxs::nodes {

GeneratorNode::GeneratorNode(std::string name, synth::GeneratorConfig config, double duration)
    : Node(std::move(name)), gen_(config), duration_(duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw Error(Errc::invalid_parameter, fmt::format("{}: duration must be >= 0", this->name()));
  }
}

std::vector<OutputSlot> GeneratorNode::output_slots(const InputTypes&) const {
  return {{"signal", PortType::signal}};
}

void GeneratorNode::update(const StepContext& ctx) {
  double until = ctx.now;
  if (duration_ > 0.0) until = std::min(until, duration_);
  Chunk chunk = gen_.generate_until(until);
  if (chunk.empty()) return;
  ++chunks_;
  output().push(std::move(chunk));
}

bool GeneratorNode::exhausted() const {
  if (duration_ <= 0.0) return false;
  const auto last = static_cast<std::uint64_t>(std::ceil(duration_ * gen_.config().fs - 1e-7));
  return gen_.next_index() >= last;
}

Counters GeneratorNode::counters() const { return {{"chunks", chunks_}, {"samples", gen_.next_index()}}; }

StimulatorNode::StimulatorNode(std::string name, synth::StimSchedule schedule)
    : Node(std::move(name)), emitter_(std::move(schedule)) {}

std::vector<OutputSlot> StimulatorNode::output_slots(const InputTypes&) const {
  return {{"markers", PortType::marker}};
}

void StimulatorNode::update(const StepContext& ctx) {
  for (auto& m : emitter_.emit_due(ctx.now)) {
    ++markers_;
    output().push(std::move(m));
  }
}

Counters StimulatorNode::counters() const { return {{"markers", markers_}}; }

ReaderNode::ReaderNode(std::string name, io::Recording recording, double rate)
    : Node(std::move(name)), recording_(std::make_unique<io::Recording>(std::move(recording))) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(Errc::invalid_parameter, fmt::format("{}: rate must be > 0", this->name()));
  }
  replayer_ = std::make_unique<io::Replayer>(*recording_, rate);
}

std::vector<OutputSlot> ReaderNode::output_slots(const InputTypes&) const {
  std::vector<OutputSlot> out;
  for (std::size_t i = 0; i < replayer_->signal_count(); ++i) {
    out.push_back({i == 0 ? "signal" : "signal" + std::to_string(i + 1), PortType::signal});
  }
  out.push_back({"markers", PortType::marker});
  return out;
}

void ReaderNode::update(const StepContext& ctx) {
  auto batch = replayer_->emit_due(ctx.now);
  for (std::size_t s = 0; s < batch.signals.size(); ++s) {
    for (auto& c : batch.signals[s]) {
      samples_ += c.rows();
      output(s).push(std::move(c));
    }
  }
  Port& markers = output(replayer_->signal_count());
  for (auto& m : batch.markers) {
    ++markers_;
    markers.push(std::move(m));
  }
}

Counters ReaderNode::counters() const { return {{"samples", samples_}, {"markers", markers_}}; }

RdaReceiveNode::RdaReceiveNode(std::string name, net::RdaClientOptions options, double offset)
    : Node(std::move(name)), options_(std::move(options)), offset_(offset) {
  if (!std::isfinite(offset)) throw Error(Errc::invalid_parameter, this->name() + ": offset must be finite");
  if (options_.max_retries < 0) throw Error(Errc::invalid_parameter, this->name() + ": max_retries must be >= 0");
}

std::vector<OutputSlot> RdaReceiveNode::output_slots(const InputTypes&) const {
  return {{"signal", PortType::signal}, {"markers", PortType::marker}};
}

void RdaReceiveNode::init() { client_ = std::make_unique<net::RdaClient>(options_); }

void RdaReceiveNode::update(const StepContext& ctx) {
  if (!client_) return;
  for (auto& ev : client_->drain()) {
    if (auto* start = std::get_if<net::RdaStart>(&ev)) {
      if (!stream_) stream_.emplace(ctx.now, offset_);
      stream_->start(*start);
    } else if (auto* data = std::get_if<net::RdaData>(&ev)) {
      if (!stream_ || !stream_->started()) throw Error(Errc::protocol_error, "RDA data before start");
      auto [chunk, markers] = stream_->convert(*data);
      if (!chunk.empty()) {
        ++chunks_;
        output(0).push(std::move(chunk));
      }
      for (auto& m : markers) {
        ++markers_;
        output(1).push(std::move(m));
      }
    } else if (auto* end = std::get_if<net::RdaEnded>(&ev)) {
      if (end->error) throw Error(Errc::protocol_error, end->reason);
      logger().info("{}: stream ended ({})", name(), end->reason);
      ended_ = true;
    }
  }
}

void RdaReceiveNode::terminate() {
  if (client_) client_->stop();
}

Counters RdaReceiveNode::counters() const {
  Counters c{{"chunks", chunks_}, {"markers", markers_}};
  if (client_) {
    c["dropped"] = client_->dropped();
    c["unknown_messages"] = client_->unknown_messages();
    c["reconnects"] = client_->reconnects();
  }
  return c;
}

NxReceiveNode::NxReceiveNode(std::string name, net::Transport transport, std::uint16_t port, double fs,
                             std::vector<std::string> names)
    : Node(std::move(name)), transport_(transport), port_(port), fs_(fs), names_(std::move(names)) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw Error(Errc::invalid_parameter, this->name() + ": fs must be > 0");
}

std::vector<OutputSlot> NxReceiveNode::output_slots(const InputTypes&) const {
  return {{"signal", PortType::signal}, {"markers", PortType::marker}};
}

void NxReceiveNode::init() { receiver_ = std::make_unique<net::NxReceiver>(transport_, port_); }

std::uint16_t NxReceiveNode::bound_port() const { return receiver_ ? receiver_->port() : port_; }

void NxReceiveNode::update(const StepContext&) {
  if (!receiver_) return;
  for (auto& frame : receiver_->drain()) {
    if (frame.kind() == net::FrameKind::signal) {
      ++chunks_;
      output(0).push(net::chunk_from_frame(frame, fs_, names_));
    } else {
      ++markers_;
      output(1).push(std::get<MarkerEvent>(std::move(frame.payload)));
    }
  }
}

void NxReceiveNode::terminate() {
  if (receiver_) receiver_->stop();
}

Counters NxReceiveNode::counters() const {
  Counters c{{"chunks", chunks_}, {"markers", markers_}};
  if (receiver_) {
    c["frames_received"] = receiver_->frames_received();
    c["frames_dropped"] = receiver_->frames_dropped();
    c["decode_errors"] = receiver_->decode_errors();
  }
  return c;
}

}  // namespace nxs::nodes
