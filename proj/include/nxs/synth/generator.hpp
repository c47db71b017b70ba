#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::synth {

enum class GenMode { random, oscillator, simulation };

GenMode parse_gen_mode(std::string_view name);

struct GeneratorConfig {
  GenMode mode = GenMode::oscillator;
  std::size_t channels = 8;
  double fs = 250.0;
  std::uint64_t seed = 42;
  double freq = 10.0;       // oscillator frequency; alpha frequency in simulation mode
  double amplitude = 1.0;   // oscillator peak; overall scale in the other modes
  double alpha_ratio = 2.0;  // simulation: alpha RMS / pink-noise RMS

  void check() const;
};

/// Standard normal deviate that depends only on (seed, channel, index), so
/// a sample's value never depends on how the stream was chunked.
double grid_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t index);

/// Pink-noise shaping filter: white noise through this fixed 4-pole/4-zero
/// IIR approximates a -10 dB/decade slope over the EEG band.
struct PinkFilter {
  static constexpr double b[4] = {0.049922035, -0.095993537, 0.050612699, -0.004408786};
  static constexpr double a[4] = {1.0, -2.494956002, 2.017265875, -0.522189400};
  /// RMS of the output for unit-variance white input.
  static double gain();

  double z[3] = {0.0, 0.0, 0.0};
  double step(double x);
};

/// Clocked signal source on the sample grid t_n = n / fs.
///
/// random: amplitude * N(0,1) per sample and channel.
/// oscillator: amplitude * sin(2 pi freq t_n) on every channel.
/// simulation: pink noise normalised to unit RMS plus a sinusoid at `freq`
/// whose RMS is alpha_ratio times the noise RMS, phase drawn per channel;
/// the sum is scaled by amplitude.
class Generator {
 public:
  explicit Generator(GeneratorConfig config);

  /// Samples with index in [next, ceil(to_t * fs)); empty if none are due.
  Chunk generate_until(double to_t);
  /// Samples with index in [first, first + count). Simulation mode is
  /// stateful and requires first == next_index().
  Chunk generate(std::uint64_t first, std::size_t count);

  std::uint64_t next_index() const noexcept { return next_; }
  const GeneratorConfig& config() const noexcept { return config_; }

 private:
  GeneratorConfig config_;
  std::vector<std::string> names_;
  std::uint64_t next_ = 0;
  std::vector<PinkFilter> pink_;
  std::vector<double> phase_;
  double pink_norm_ = 1.0;
};

}  // namespace nxs::synth
