#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nxs/core/node.hpp"
#include "nxs/dsl/expr.hpp"
#include "nxs/dsp/analysis.hpp"
#include "nxs/dsp/filters.hpp"
#include "nxs/epoch/epocher.hpp"
#include "nxs/io/binlog.hpp"
#include "nxs/io/csv.hpp"
#include "nxs/io/recording.hpp"
#include "nxs/io/replay.hpp"
#include "nxs/ml/lda.hpp"
#include "nxs/net/nxframe.hpp"
#include "nxs/net/rda.hpp"
#include "nxs/select/selection.hpp"
#include "nxs/synth/generator.hpp"
#include "nxs/synth/stimulator.hpp"

// Node adapters wrapping the algorithm modules. Each class is also
// registered by kind name in NodeRegistry::builtin().

namespace nxs::nodes {

// ---- sources ---------------------------------------------------------------

/// Emits every grid sample due by the pipeline clock. With `duration` > 0
/// the source is finite and reports exhausted() after that many seconds.
class GeneratorNode final : public Node {
 public:
  GeneratorNode(std::string name, synth::GeneratorConfig config, double duration = 0.0);

  std::string_view kind() const override { return "Generator"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  bool exhausted() const override;
  Counters counters() const override;

 private:
  synth::Generator gen_;
  double duration_;
  std::uint64_t chunks_ = 0;
};

class StimulatorNode final : public Node {
 public:
  StimulatorNode(std::string name, synth::StimSchedule schedule);

  std::string_view kind() const override { return "Stimulator"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  bool exhausted() const override { return emitter_.done(); }
  Counters counters() const override;

 private:
  synth::StimEmitter emitter_;
  std::uint64_t markers_ = 0;
};

/// Replays a recording. Output ports: "signal", "signal2", ... (one per
/// signal stream, file order) followed by "markers".
class ReaderNode final : public Node {
 public:
  ReaderNode(std::string name, io::Recording recording, double rate = 1.0);

  std::string_view kind() const override { return "Reader"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  bool exhausted() const override { return replayer_->done(); }
  Counters counters() const override;

  const io::Recording& recording() const noexcept { return *recording_; }

 private:
  std::unique_ptr<io::Recording> recording_;
  std::unique_ptr<io::Replayer> replayer_;
  std::uint64_t samples_ = 0;
  std::uint64_t markers_ = 0;
};

/// Live RDA client. The TCP connection is opened by init(). The session
/// origin is the pipeline clock when the Start message is taken off the queue.
class RdaReceiveNode final : public Node {
 public:
  RdaReceiveNode(std::string name, net::RdaClientOptions options, double offset = 0.0);

  std::string_view kind() const override { return "RdaReceive"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void init() override;
  void update(const StepContext& ctx) override;
  void terminate() override;
  bool exhausted() const override { return ended_; }
  Counters counters() const override;

 private:
  net::RdaClientOptions options_;
  double offset_;
  std::unique_ptr<net::RdaClient> client_;
  std::optional<net::RdaStream> stream_;
  bool ended_ = false;
  std::uint64_t chunks_ = 0;
  std::uint64_t markers_ = 0;
};

/// NxFrame receiver. Signal frames become chunks at the configured rate;
/// `names` (optional) label the channels.
class NxReceiveNode final : public Node {
 public:
  NxReceiveNode(std::string name, net::Transport transport, std::uint16_t port, double fs,
                std::vector<std::string> names = {});

  std::string_view kind() const override { return "NxReceive"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void init() override;
  void update(const StepContext& ctx) override;
  void terminate() override;
  Counters counters() const override;

  /// Bound port, valid after init (useful with port 0).
  std::uint16_t bound_port() const;

 private:
  net::Transport transport_;
  std::uint16_t port_;
  double fs_;
  std::vector<std::string> names_;
  std::unique_ptr<net::NxReceiver> receiver_;
  std::uint64_t chunks_ = 0;
  std::uint64_t markers_ = 0;
};

// ---- temporal filters ------------------------------------------------------

/// Stateful IIR filter on a signal stream, designed from the first chunk's
/// sampling rate.
class IirFilterNode : public Node {
 public:
  using Design = std::function<dsp::SosCascade(double fs)>;

  IirFilterNode(std::string name, std::string kind, Design design);

  std::string_view kind() const override { return kind_; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  Counters counters() const override;

 private:
  std::string kind_;
  Design design_;
  std::optional<dsp::SosFilter> filter_;
  double fs_ = 0.0;
  std::uint64_t samples_ = 0;
};

/// Cutoff ordering and order are checked here; the Nyquist bound once the
/// first chunk fixes fs.
std::unique_ptr<IirFilterNode> make_butter_filter(std::string name, double lowcut, double highcut, int order);
std::unique_ptr<IirFilterNode> make_notch_filter(std::string name, double freq, double q = 30.0);

class DownSampleNode final : public Node {
 public:
  DownSampleNode(std::string name, int factor);

  std::string_view kind() const override { return "DownSample"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  Counters counters() const override;

 private:
  dsp::Decimator decimator_;
  std::uint64_t samples_out_ = 0;
};

// ---- spectral and epoch analysis -------------------------------------------

/// Welch PSD. Epoch input: one frame per epoch. Signal input: a sliding
/// window of 4 * segment_length samples, one frame every `stride` samples
/// once the window is full, stamped with the window's last sample time.
class PsdWelchNode final : public Node {
 public:
  PsdWelchNode(std::string name, dsp::WelchParams params, std::size_t stride = 0);

  std::string_view kind() const override { return "PsdWelch"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  Counters counters() const override;

  std::size_t window_length() const noexcept { return 4 * params_.segment_length; }
  std::size_t stride() const noexcept { return stride_; }

  /// Sliding-window core, usable outside a pipeline.
  std::vector<SpectrumFrame> accumulate(const Chunk& chunk);

 private:
  SpectrumFrame emit() const;

  dsp::WelchParams params_;
  std::size_t stride_;
  std::deque<double> ts_;
  std::deque<double> values_;
  std::vector<std::string> names_;
  double fs_ = 0.0;
  std::uint64_t total_ = 0;
  std::uint64_t frames_ = 0;
};

class FftNode final : public Node {
 public:
  explicit FftNode(std::string name) : Node(std::move(name)) {}

  std::string_view kind() const override { return "Fft"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
};

enum class HilbertOutput { envelope, phase };

class HilbertNode final : public Node {
 public:
  HilbertNode(std::string name, HilbertOutput output) : Node(std::move(name)), output_(output) {}

  std::string_view kind() const override { return "HilbertTransform"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;

 private:
  HilbertOutput output_;
};

class WindowingNode final : public Node {
 public:
  WindowingNode(std::string name, dsp::WindowKind window) : Node(std::move(name)), window_(window) {}

  std::string_view kind() const override { return "Windowing"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;

 private:
  dsp::WindowKind window_;
};

class UnivariateStatNode final : public Node {
 public:
  UnivariateStatNode(std::string name, dsp::Stat stat) : Node(std::move(name)), stat_(stat) {}

  std::string_view kind() const override { return "UnivariateStat"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;

 private:
  dsp::Stat stat_;
};

// ---- stateless table transforms (signal or epoch, type preserved) ----------

class TableNode : public Node {
 public:
  using Node::Node;

  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes& inputs) const override;
  void update(const StepContext& ctx) override;

 protected:
  virtual void transform(SampleTable& data, std::vector<std::string>& names) = 0;
};

class ChannelSelectorNode final : public TableNode {
 public:
  ChannelSelectorNode(std::string name, std::vector<ChannelSelector> channels);
  std::string_view kind() const override { return "ChannelSelector"; }

 protected:
  void transform(SampleTable& data, std::vector<std::string>& names) override;

 private:
  std::vector<ChannelSelector> channels_;
};

class SpatialFilterNode final : public TableNode {
 public:
  SpatialFilterNode(std::string name, select::SpatialMatrix matrix);
  std::string_view kind() const override { return "SpatialFilter"; }

 protected:
  void transform(SampleTable& data, std::vector<std::string>& names) override;

 private:
  select::SpatialMatrix matrix_;
};

class ReferenceChannelNode final : public TableNode {
 public:
  ReferenceChannelNode(std::string name, ChannelSelector ref) : TableNode(std::move(name)), ref_(std::move(ref)) {}
  std::string_view kind() const override { return "ReferenceChannel"; }

 protected:
  void transform(SampleTable& data, std::vector<std::string>& names) override;

 private:
  ChannelSelector ref_;
};

class CommonAverageNode final : public TableNode {
 public:
  using TableNode::TableNode;
  std::string_view kind() const override { return "CommonAverageReference"; }

 protected:
  void transform(SampleTable& data, std::vector<std::string>& names) override;
};

class ApplyFunctionNode final : public TableNode {
 public:
  ApplyFunctionNode(std::string name, dsl::Expr expr) : TableNode(std::move(name)), expr_(std::move(expr)) {}
  std::string_view kind() const override { return "ApplyFunction"; }
  Counters counters() const override { return {{"nonfinite", stats_.nonfinite}}; }

 protected:
  void transform(SampleTable& data, std::vector<std::string>& names) override;

 private:
  dsl::Expr expr_;
  dsl::EvalStats stats_;
};

// ---- epoching --------------------------------------------------------------

/// Slots: "signal" and, for the marker-driven kinds, "markers".
class EpochingNode final : public Node {
 public:
  EpochingNode(std::string name, std::string kind, epoch::Epocher epocher, bool uses_markers);

  std::string_view kind() const override { return kind_; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  Counters counters() const override;

 private:
  std::string kind_;
  epoch::Epocher epocher_;
  bool uses_markers_;
};

// ---- features and classification -------------------------------------------

/// Up to kMaxInputs vector inputs ("in1".."in8"). Items are queued per input
/// and combined in arrival order once every connected input has one.
class FeatureAggregatorNode final : public Node {
 public:
  static constexpr std::size_t kMaxInputs = 8;

  FeatureAggregatorNode(std::string name, double tolerance = 1e-3);

  std::string_view kind() const override { return "FeatureAggregator"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  Counters counters() const override { return {{"vectors", emitted_}}; }

 private:
  double tolerance_;
  std::vector<std::deque<FeatureVector>> queues_;
  std::uint64_t emitted_ = 0;
};

/// Class mode emits {index} with the predicted label; probability mode emits
/// one probability per class ("p:<label>") with the argmax label.
class ClassifyNode final : public Node {
 public:
  ClassifyNode(std::string name, ml::LdaModel model, ml::PredictMode mode);

  std::string_view kind() const override { return "Classify"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override;
  void update(const StepContext& ctx) override;
  Counters counters() const override { return {{"predictions", predictions_}}; }

 private:
  ml::LdaModel model_;
  ml::PredictMode mode_;
  std::uint64_t predictions_ = 0;
};

// ---- sinks -----------------------------------------------------------------

/// Slot "input" takes signal, vector or marker items; optional slot
/// "markers" sends markers to the sibling markers file.
class ToCsvNode final : public Node {
 public:
  ToCsvNode(std::string name, std::filesystem::path file);

  std::string_view kind() const override { return "ToCsv"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override { return {}; }
  void update(const StepContext& ctx) override;
  void terminate() override;
  Counters counters() const override;

 private:
  io::CsvSink sink_;
  std::uint64_t markers_ = 0;
};

class BinLogNode final : public Node {
 public:
  BinLogNode(std::string name, std::filesystem::path file);

  std::string_view kind() const override { return "BinLog"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override { return {}; }
  void update(const StepContext& ctx) override;
  void terminate() override;
  Counters counters() const override { return {{"records", writer_.records()}}; }

 private:
  io::BinLogWriter writer_;
};

/// Sends signal chunks, feature vectors (as one-row signal frames) and
/// markers. The socket is opened by init().
class NxSendNode final : public Node {
 public:
  NxSendNode(std::string name, net::Transport transport, std::string host, std::uint16_t port,
             std::string stream);

  std::string_view kind() const override { return "NxSend"; }
  std::vector<InputSlot> input_slots() const override;
  std::vector<OutputSlot> output_slots(const InputTypes&) const override { return {}; }
  void init() override;
  void update(const StepContext& ctx) override;
  Counters counters() const override;

 private:
  net::Transport transport_;
  std::string host_;
  std::uint16_t port_;
  std::string stream_;
  std::unique_ptr<net::NxSender> sender_;
};

}  // namespace nxs::nodes
