#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nxs/nodes/nodes.hpp"

namespace nxs::nodes {

namespace {

const std::vector<PortType> kSignalOrEpoch = {PortType::signal, PortType::epoch};

PortType mirrored(const InputTypes& inputs) {
  return !inputs.empty() && inputs[0] ? *inputs[0] : PortType::signal;
}

}  // namespace

// ---- filters ---------------------------------------------------------------

IirFilterNode::IirFilterNode(std::string name, std::string kind, Design design)
    : Node(std::move(name)), kind_(std::move(kind)), design_(std::move(design)) {}

std::vector<InputSlot> IirFilterNode::input_slots() const { return {{"input", {PortType::signal}}}; }

std::vector<OutputSlot> IirFilterNode::output_slots(const InputTypes&) const {
  return {{"signal", PortType::signal}};
}

void IirFilterNode::update(const StepContext&) {
  for (const auto& chunk : input(0)->items<Chunk>()) {
    if (!filter_) {
      if (!chunk.regular()) throw Error(Errc::invalid_parameter, name() + ": needs a regularly sampled stream");
      fs_ = chunk.sampling_rate;
      filter_.emplace(design_(fs_));
    }
    samples_ += chunk.rows();
    output().push(filter_->apply(chunk));
  }
}

Counters IirFilterNode::counters() const { return {{"samples", samples_}}; }

std::unique_ptr<IirFilterNode> make_butter_filter(std::string name, double lowcut, double highcut, int order) {
  if (!(lowcut > 0.0 && lowcut < highcut && std::isfinite(highcut))) {
    throw Error(Errc::invalid_band,
                fmt::format("{}: need 0 < lowcut < highcut, got lowcut={} highcut={}", name, lowcut, highcut));
  }
  if (order < 1 || order > 16) throw Error(Errc::invalid_band, fmt::format("{}: order {} outside [1, 16]", name, order));
  return std::make_unique<IirFilterNode>(std::move(name), "ButterFilter", [=](double fs) {
    return dsp::design_butter_bandpass(lowcut, highcut, order, fs);
  });
}

std::unique_ptr<IirFilterNode> make_notch_filter(std::string name, double freq, double q) {
  if (!(freq > 0.0) || !(q > 0.0)) {
    throw Error(Errc::invalid_band, fmt::format("{}: need freq > 0 and q > 0, got freq={} q={}", name, freq, q));
  }
  return std::make_unique<IirFilterNode>(std::move(name), "NotchFilter",
                                         [=](double fs) { return dsp::design_notch(freq, q, fs); });
}

DownSampleNode::DownSampleNode(std::string name, int factor) : Node(std::move(name)), decimator_(factor) {}

std::vector<InputSlot> DownSampleNode::input_slots() const { return {{"input", {PortType::signal}}}; }

std::vector<OutputSlot> DownSampleNode::output_slots(const InputTypes&) const {
  return {{"signal", PortType::signal}};
}

void DownSampleNode::update(const StepContext&) {
  for (const auto& chunk : input(0)->items<Chunk>()) {
    Chunk out = decimator_.apply(chunk);
    if (out.empty()) continue;
    samples_out_ += out.rows();
    output().push(std::move(out));
  }
}

Counters DownSampleNode::counters() const { return {{"samples", samples_out_}}; }

// ---- spectral --------------------------------------------------------------

PsdWelchNode::PsdWelchNode(std::string name, dsp::WelchParams params, std::size_t stride)
    : Node(std::move(name)), params_(params), stride_(stride == 0 ? params.segment_length : stride) {
  params_.check();
}

std::vector<InputSlot> PsdWelchNode::input_slots() const { return {{"input", kSignalOrEpoch}}; }

std::vector<OutputSlot> PsdWelchNode::output_slots(const InputTypes&) const {
  return {{"spectrum", PortType::spectrum}};
}

std::vector<SpectrumFrame> PsdWelchNode::accumulate(const Chunk& chunk) {
  if (!chunk.regular()) throw Error(Errc::invalid_parameter, name() + ": needs a regularly sampled stream");
  if (names_.empty()) {
    names_ = chunk.channel_names;
    fs_ = chunk.sampling_rate;
  } else if (chunk.channel_names.size() != names_.size()) {
    throw Error(Errc::channel_count_changed,
                fmt::format("{}: window has {} channels, chunk has {}", name(), names_.size(), chunk.channels()));
  }
  const std::size_t window = window_length();
  const std::size_t c = names_.size();
  std::vector<SpectrumFrame> frames;
  for (std::size_t r = 0; r < chunk.rows(); ++r) {
    ts_.push_back(chunk.timestamps[r]);
    for (std::size_t k = 0; k < c; ++k) values_.push_back(chunk.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
    if (ts_.size() > window) {
      ts_.pop_front();
      values_.erase(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(c));
    }
    ++total_;
    if (total_ >= window && (total_ - window) % stride_ == 0) frames.push_back(emit());
  }
  return frames;
}

SpectrumFrame PsdWelchNode::emit() const {
  const std::size_t window = window_length();
  const std::size_t c = names_.size();
  SampleTable data(static_cast<Eigen::Index>(window), static_cast<Eigen::Index>(c));
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index k = 0; k < data.cols(); ++k) data(r, k) = values_[i++];
  }
  SpectrumFrame f;
  f.timestamp = ts_.back();
  f.frequencies = dsp::welch_frequencies(fs_, params_);
  f.channel_names = names_;
  f.values = dsp::welch_psd(data, fs_, params_);
  f.scaling = SpectrumScaling::density;
  return f;
}

void PsdWelchNode::update(const StepContext&) {
  const Port* in = input(0);
  if (in->type() == PortType::epoch) {
    for (const auto& e : in->items<Epoch>()) {
      ++frames_;
      output().push(dsp::welch_psd(e, params_));
    }
    return;
  }
  for (const auto& chunk : in->items<Chunk>()) {
    for (auto& f : accumulate(chunk)) {
      ++frames_;
      output().push(std::move(f));
    }
  }
}

Counters PsdWelchNode::counters() const { return {{"frames", frames_}}; }

std::vector<InputSlot> FftNode::input_slots() const { return {{"input", {PortType::epoch}}}; }

std::vector<OutputSlot> FftNode::output_slots(const InputTypes&) const {
  return {{"spectrum", PortType::spectrum}};
}

void FftNode::update(const StepContext&) {
  for (const auto& e : input(0)->items<Epoch>()) output().push(dsp::fft_magnitude(e));
}

std::vector<InputSlot> HilbertNode::input_slots() const { return {{"input", {PortType::epoch}}}; }

std::vector<OutputSlot> HilbertNode::output_slots(const InputTypes&) const {
  return {{"epoch", PortType::epoch}};
}

void HilbertNode::update(const StepContext&) {
  for (const auto& e : input(0)->items<Epoch>()) {
    auto r = dsp::hilbert_analytic(e);
    output().push(output_ == HilbertOutput::envelope ? std::move(r.envelope) : std::move(r.phase));
  }
}

std::vector<InputSlot> WindowingNode::input_slots() const { return {{"input", {PortType::epoch}}}; }

std::vector<OutputSlot> WindowingNode::output_slots(const InputTypes&) const {
  return {{"epoch", PortType::epoch}};
}

void WindowingNode::update(const StepContext&) {
  for (const auto& e : input(0)->items<Epoch>()) output().push(dsp::apply_window(e, window_));
}

std::vector<InputSlot> UnivariateStatNode::input_slots() const { return {{"input", {PortType::epoch}}}; }

std::vector<OutputSlot> UnivariateStatNode::output_slots(const InputTypes&) const {
  return {{"vector", PortType::vector}};
}

void UnivariateStatNode::update(const StepContext&) {
  for (const auto& e : input(0)->items<Epoch>()) output().push(dsp::univariate_stat(e, stat_));
}

// ---- table transforms ------------------------------------------------------

std::vector<InputSlot> TableNode::input_slots() const { return {{"input", kSignalOrEpoch}}; }

std::vector<OutputSlot> TableNode::output_slots(const InputTypes& inputs) const {
  const PortType t = mirrored(inputs);
  return {{std::string(to_string(t)), t}};
}

void TableNode::update(const StepContext&) {
  const Port* in = input(0);
  if (in->type() == PortType::epoch) {
    for (const auto& e : in->items<Epoch>()) {
      Epoch out = e;
      transform(out.data, out.channel_names);
      output().push(std::move(out));
    }
    return;
  }
  for (const auto& c : in->items<Chunk>()) {
    Chunk out = c;
    transform(out.data, out.channel_names);
    output().push(std::move(out));
  }
}

ChannelSelectorNode::ChannelSelectorNode(std::string name, std::vector<ChannelSelector> channels)
    : TableNode(std::move(name)), channels_(std::move(channels)) {
  if (channels_.empty()) throw Error(Errc::invalid_parameter, this->name() + ": channels must not be empty");
}

void ChannelSelectorNode::transform(SampleTable& data, std::vector<std::string>& names) {
  const auto cols = select::resolve_channels(names, channels_);
  data = select::select_columns(data, cols);
  std::vector<std::string> picked;
  for (auto c : cols) picked.push_back(names[c]);
  names = std::move(picked);
}

SpatialFilterNode::SpatialFilterNode(std::string name, select::SpatialMatrix matrix)
    : TableNode(std::move(name)), matrix_(std::move(matrix)) {
  matrix_.check();
}

void SpatialFilterNode::transform(SampleTable& data, std::vector<std::string>& names) {
  data = select::apply_spatial(data, matrix_);
  names = matrix_.names;
}

void ReferenceChannelNode::transform(SampleTable& data, std::vector<std::string>& names) {
  select::rereference_inplace(data, select::resolve_channel(names, ref_));
}

void CommonAverageNode::transform(SampleTable& data, std::vector<std::string>&) {
  select::common_average_inplace(data);
}

void ApplyFunctionNode::transform(SampleTable& data, std::vector<std::string>&) {
  dsl::eval_inplace(expr_, data, &stats_);
}

// ---- epoching --------------------------------------------------------------

EpochingNode::EpochingNode(std::string name, std::string kind, epoch::Epocher epocher, bool uses_markers)
    : Node(std::move(name)), kind_(std::move(kind)), epocher_(std::move(epocher)), uses_markers_(uses_markers) {}

std::vector<InputSlot> EpochingNode::input_slots() const {
  std::vector<InputSlot> slots{{"signal", {PortType::signal}}};
  if (uses_markers_) slots.push_back({"markers", {PortType::marker}});
  return slots;
}

std::vector<OutputSlot> EpochingNode::output_slots(const InputTypes&) const {
  return {{"epoch", PortType::epoch}};
}

void EpochingNode::update(const StepContext&) {
  if (uses_markers_) epocher_.add_markers(input(1)->items<MarkerEvent>());
  const auto& chunks = input(0)->items<Chunk>();
  std::vector<Epoch> epochs;
  if (chunks.empty()) {
    epochs = epocher_.poll();
  } else {
    for (const auto& c : chunks) {
      auto got = epocher_.push(c);
      std::move(got.begin(), got.end(), std::back_inserter(epochs));
    }
  }
  for (auto& e : epochs) output().push(std::move(e));
}

Counters EpochingNode::counters() const {
  const auto& c = epocher_.counters();
  return {{"epochs", c.emitted},
          {"skipped_before_buffer", c.skipped_before_buffer},
          {"dropped_on_overflow", c.dropped_on_overflow},
          {"ignored_markers", c.ignored_markers}};
}

}  // namespace nxs::nodes
