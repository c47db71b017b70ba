#include <cctype>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nxs/core/registry.hpp"
#include "nxs/io/brainvision.hpp"
#include "nxs/io/xdf.hpp"
#include "nxs/nodes/nodes.hpp"

namespace nxs {

namespace {

using namespace nxs::nodes;

ParamSpec opt(std::string name, std::string type, std::string def, std::string help) {
  return {std::move(name), std::move(type), std::move(def), std::move(help), false};
}

ParamSpec req(std::string name, std::string type, std::string help) {
  return {std::move(name), std::move(type), "", std::move(help), true};
}

int as_int(const ParamSet& p, const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) {
  const auto v = p.get_int(key, fallback);
  if (v < lo || v > hi) {
    throw Error(Errc::invalid_parameter, fmt::format("parameter '{}' = {} outside [{}, {}]", key, v, lo, hi));
  }
  return static_cast<int>(v);
}

std::uint16_t as_port(const ParamSet& p, const std::string& key, std::int64_t fallback) {
  return static_cast<std::uint16_t>(as_int(p, key, fallback, 0, 65535));
}

double positive(const ParamSet& p, const std::string& key) {
  const double v = p.get_double(key);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(Errc::invalid_parameter, fmt::format("parameter '{}' must be > 0, got {}", key, v));
  }
  return v;
}

io::Recording load_recording(const std::filesystem::path& file) {
  auto ext = file.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".xdf") return io::read_xdf(file);
  if (ext == ".vhdr") return io::read_brainvision(file);
  throw Error(Errc::invalid_parameter, "unsupported recording type '" + ext + "' (expected .xdf or .vhdr)");
}

epoch::StimCode stim_code(const ParamSet& p) {
  if (!p.has("code")) throw Error(Errc::invalid_parameter, "missing required parameter 'code'");
  const Value& v = p.values().at("code");
  epoch::StimCode code;
  if (v.is_int()) {
    const auto c = v.as_int();
    if (c < std::numeric_limits<std::int32_t>::min() || c > std::numeric_limits<std::int32_t>::max()) {
      throw Error(Errc::invalid_parameter, "parameter 'code' does not fit 32 bits");
    }
    code.code = static_cast<std::int32_t>(c);
  } else if (v.is_string() && !v.as_string().empty()) {
    code.label = v.as_string();
  } else {
    throw Error(Errc::invalid_parameter, "parameter 'code' must be an integer or a non-empty label");
  }
  return code;
}

void add_sources(NodeRegistry& r) {
  r.add({"Generator",
         "synthetic signal source (random, oscillator or simulated EEG)",
         {opt("mode", "string", "oscillator", "random | oscillator | simulation"),
          opt("channels", "int", "8", "channel count"), opt("fs", "float", "250", "sampling rate in Hz"),
          opt("seed", "int", "42", "noise seed"), opt("freq", "float", "10", "oscillator / alpha frequency in Hz"),
          opt("amplitude", "float", "1", "peak amplitude (oscillator) or overall scale"),
          opt("alpha_ratio", "float", "2", "simulation: alpha RMS over noise RMS"),
          opt("duration", "float", "0", "stop after this many seconds (0 = endless)")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           synth::GeneratorConfig c;
           c.mode = synth::parse_gen_mode(p.get_string("mode", "oscillator"));
           c.channels = static_cast<std::size_t>(as_int(p, "channels", 8, 1, 4096));
           c.fs = p.get_double("fs", 250.0);
           c.seed = static_cast<std::uint64_t>(p.get_int("seed", 42));
           c.freq = p.get_double("freq", 10.0);
           c.amplitude = p.get_double("amplitude", 1.0);
           c.alpha_ratio = p.get_double("alpha_ratio", 2.0);
           c.check();
           return std::make_unique<GeneratorNode>(name, c, p.get_double("duration", 0.0));
         }});
  r.add({"Stimulator",
         "marker stream from an XML experiment design",
         {req("file", "path", "experiment XML")},
         [](const std::string& name, const ParamSet& p, const BuildContext& ctx) {
           return std::make_unique<StimulatorNode>(name, synth::load_stim_config(ctx.resolve(p.get_string("file"))));
         }});
  r.add({"Reader",
         "replays an .xdf or .vhdr recording (ports signal, signal2, ..., markers)",
         {req("file", "path", "recording file"), opt("rate", "float", "1", "real-time factor")},
         [](const std::string& name, const ParamSet& p, const BuildContext& ctx) {
           return std::make_unique<ReaderNode>(name, load_recording(ctx.resolve(p.get_string("file"))),
                                               p.get_double("rate", 1.0));
         }});
  r.add({"RdaReceive",
         "Brain Products RDA client (ports signal, markers)",
         {opt("host", "string", "127.0.0.1", "recorder host"),
          opt("port", "int", "51244", "TCP port (float protocol)"),
          opt("offset", "float", "0", "seconds subtracted from every timestamp"),
          opt("max_retries", "int", "5", "connection attempts before giving up")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           net::RdaClientOptions o;
           o.host = p.get_string("host", "127.0.0.1");
           o.port = as_port(p, "port", net::kRdaDefaultPort);
           o.max_retries = as_int(p, "max_retries", 5, 0, 1000);
           return std::make_unique<RdaReceiveNode>(name, o, p.get_double("offset", 0.0));
         }});
  r.add({"NxReceive",
         "NxFrame receiver over UDP or TCP (ports signal, markers)",
         {opt("transport", "string", "udp", "udp | tcp"), req("port", "int", "listen port"),
          req("fs", "float", "sampling rate of the incoming signal"),
          opt("names", "list<string>", "[]", "channel names (default Ch1..ChN)")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           std::vector<std::string> names;
           if (p.has("names")) names = p.get_strings("names");
           return std::make_unique<NxReceiveNode>(name, net::parse_transport(p.get_string("transport", "udp")),
                                                  as_port(p, "port", 0), positive(p, "fs"), names);
         }});
}

void add_processing(NodeRegistry& r) {
  r.add({"ButterFilter",
         "streaming Butterworth band-pass",
         {req("lowcut", "float", "lower -3 dB frequency in Hz"), req("highcut", "float", "upper -3 dB frequency in Hz"),
          opt("order", "int", "4", "prototype order (1..16)")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) -> std::unique_ptr<Node> {
           return make_butter_filter(name, p.get_double("lowcut"), p.get_double("highcut"),
                                     as_int(p, "order", 4, 1, 16));
         }});
  r.add({"NotchFilter",
         "single-biquad notch",
         {req("freq", "float", "notch frequency in Hz"), opt("q", "float", "30", "quality factor")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) -> std::unique_ptr<Node> {
           return make_notch_filter(name, p.get_double("freq"), p.get_double("q", 30.0));
         }});
  r.add({"DownSample",
         "anti-aliased integer decimation",
         {req("factor", "int", "decimation factor (>= 2)")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<DownSampleNode>(name, as_int(p, "factor", 0, 2, 1 << 20));
         }});
  r.add({"PsdWelch",
         "Welch power spectral density of epochs or of a sliding signal window",
         {opt("segment_length", "int", "256", "samples per segment"),
          opt("overlap", "float", "0.5", "segment overlap fraction"),
          opt("window", "string", "hanning", "blackman | hanning | hamming | triangular"),
          opt("stride", "int", "segment_length", "signal input: samples between frames")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           dsp::WelchParams w;
           w.segment_length = static_cast<std::size_t>(as_int(p, "segment_length", 256, 8, 1 << 24));
           w.overlap = p.get_double("overlap", 0.5);
           w.window = dsp::parse_window(p.get_string("window", "hanning"));
           const auto stride = static_cast<std::size_t>(as_int(p, "stride", 0, 0, 1 << 24));
           return std::make_unique<PsdWelchNode>(name, w, stride);
         }});
  r.add({"Fft", "DFT magnitude of each epoch", {},
         [](const std::string& name, const ParamSet&, const BuildContext&) {
           return std::make_unique<FftNode>(name);
         }});
  r.add({"HilbertTransform",
         "analytic-signal envelope or phase of each epoch",
         {opt("output", "string", "envelope", "envelope | phase")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           const auto out = p.get_string("output", "envelope");
           if (out != "envelope" && out != "phase") {
             throw Error(Errc::invalid_parameter, "parameter 'output' must be envelope or phase, got '" + out + "'");
           }
           return std::make_unique<HilbertNode>(name, out == "envelope" ? HilbertOutput::envelope
                                                                         : HilbertOutput::phase);
         }});
  r.add({"Windowing",
         "multiplies each epoch by a symmetric window",
         {opt("kind", "string", "hanning", "blackman | hanning | hamming | triangular")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<WindowingNode>(name, dsp::parse_window(p.get_string("kind", "hanning")));
         }});
  r.add({"UnivariateStat",
         "per-channel statistic of each epoch",
         {req("stat", "string", "mean | median | min | max | range | std | quantile | iqr"),
          opt("p", "float", "0.5", "quantile level")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<UnivariateStatNode>(name, dsp::parse_stat(p.get_string("stat"), p.get_double("p", 0.5)));
         }});
  r.add({"ChannelSelector",
         "keeps the listed channels in the listed order",
         {req("channels", "list<string|int>", "names or zero-based indices")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<ChannelSelectorNode>(name, p.get_selectors("channels"));
         }});
  r.add({"SpatialFilter",
         "linear combination of channels",
         {req("matrix", "list<list<float>>", "N_out x N_in coefficients"),
          opt("names", "list<string>", "S1..SN", "output channel names")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           const auto rows = p.get_matrix("matrix");
           select::SpatialMatrix m;
           m.coefficients.resize(static_cast<Eigen::Index>(rows.size()),
                                 static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
           for (std::size_t i = 0; i < rows.size(); ++i) {
             if (rows[i].size() != rows[0].size()) {
               throw Error(Errc::invalid_parameter, "parameter 'matrix': rows differ in length");
             }
             for (std::size_t j = 0; j < rows[i].size(); ++j) {
               m.coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
             }
           }
           m.names = p.has("names") ? p.get_strings("names") : default_channel_names(rows.size(), "S");
           return std::make_unique<SpatialFilterNode>(name, std::move(m));
         }});
  r.add({"ReferenceChannel",
         "subtracts a reference channel from every channel",
         {req("ref", "string|int", "reference channel name or index")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<ReferenceChannelNode>(name, p.get_selector("ref"));
         }});
  r.add({"CommonAverageReference", "subtracts the cross-channel mean", {},
         [](const std::string& name, const ParamSet&, const BuildContext&) {
           return std::make_unique<CommonAverageNode>(name);
         }});
  r.add({"ApplyFunction",
         "elementwise expression in x",
         {req("expr", "string", "e.g. \"x ^ 2\"")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<ApplyFunctionNode>(name, dsl::parse_expression(p.get_string("expr")));
         }});
}

void add_epoching(NodeRegistry& r) {
  r.add({"TimeBasedEpoching",
         "epochs on a fixed time grid",
         {req("duration", "float", "epoch length in s"), req("interval", "float", "onset spacing in s")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<EpochingNode>(
               name, "TimeBasedEpoching", epoch::Epocher::time_based(positive(p, "duration"), positive(p, "interval")),
               false);
         }});
  r.add({"MarkerBasedEpoching",
         "one epoch per marker (inputs: signal, markers)",
         {req("duration", "float", "epoch length in s")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<EpochingNode>(name, "MarkerBasedEpoching",
                                                 epoch::Epocher::marker_based(positive(p, "duration")), true);
         }});
  r.add({"StimulationBasedEpoching",
         "one epoch per matching marker (inputs: signal, markers)",
         {req("code", "string|int", "marker label or integer code"), req("duration", "float", "epoch length in s"),
          opt("offset", "float", "0", "onset delay after the marker in s (>= 0)")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<EpochingNode>(
               name, "StimulationBasedEpoching",
               epoch::Epocher::marker_based(positive(p, "duration"), p.get_double("offset", 0.0), stim_code(p)), true);
         }});
}

void add_outputs(NodeRegistry& r) {
  r.add({"FeatureAggregator",
         "concatenates up to 8 vector inputs in input order",
         {opt("tolerance", "float", "0.001", "max timestamp difference in s")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<FeatureAggregatorNode>(name, p.get_double("tolerance", 1e-3));
         }});
  r.add({"Classify",
         "LDA prediction per feature vector",
         {req("model_file", "path", "model written by `nxs train`"),
          opt("mode", "string", "class", "class | probability")},
         [](const std::string& name, const ParamSet& p, const BuildContext& ctx) {
           return std::make_unique<ClassifyNode>(name, ml::load_model_file(ctx.resolve(p.get_string("model_file"))),
                                                 ml::parse_predict_mode(p.get_string("mode", "class")));
         }});
  r.add({"ToCsv",
         "CSV sink for signal, vector or marker input (optional markers input)",
         {req("file", "path", "output CSV; markers go to <stem>_markers.csv")},
         [](const std::string& name, const ParamSet& p, const BuildContext& ctx) {
           return std::make_unique<ToCsvNode>(name, ctx.resolve(p.get_string("file")));
         }});
  r.add({"BinLog",
         "NXL1 chunked binary log of a signal",
         {req("file", "path", "output file")},
         [](const std::string& name, const ParamSet& p, const BuildContext& ctx) {
           return std::make_unique<BinLogNode>(name, ctx.resolve(p.get_string("file")));
         }});
  r.add({"NxSend",
         "NxFrame sender for signal, vector or marker input",
         {opt("transport", "string", "udp", "udp | tcp"), opt("host", "string", "127.0.0.1", "destination host"),
          req("port", "int", "destination port"), opt("stream", "string", "<node name>", "stream name")},
         [](const std::string& name, const ParamSet& p, const BuildContext&) {
           return std::make_unique<NxSendNode>(name, net::parse_transport(p.get_string("transport", "udp")),
                                               p.get_string("host", "127.0.0.1"), as_port(p, "port", 0),
                                               p.get_string("stream", name));
         }});
}

}  // namespace

const NodeRegistry& NodeRegistry::builtin() {
  static const NodeRegistry registry = [] {
    NodeRegistry r;
    add_sources(r);
    add_processing(r);
    add_epoching(r);
    add_outputs(r);
    return r;
  }();
  return registry;
}

}  // namespace nxs
