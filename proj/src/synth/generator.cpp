#include "nxs/synth/generator.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::synth {

using std::numbers::pi;

GenMode parse_gen_mode(std::string_view name) {
  if (name == "random") return GenMode::random;
  if (name == "oscillator") return GenMode::oscillator;
  if (name == "simulation") return GenMode::simulation;
  throw Error(Errc::invalid_parameter, fmt::format("unknown mode '{}' (random, oscillator, simulation)", name));
}

void GeneratorConfig::check() const {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw Error(Errc::invalid_parameter, fmt::format("fs {} must be > 0", fs));
  if (channels < 1) throw Error(Errc::invalid_parameter, "channels must be >= 1");
  if (channels > 65535) throw Error(Errc::invalid_parameter, "channels must be <= 65535");
  if (!std::isfinite(freq) || freq < 0.0) throw Error(Errc::invalid_parameter, fmt::format("freq {} invalid", freq));
  if (!std::isfinite(amplitude)) throw Error(Errc::invalid_parameter, "amplitude must be finite");
  if (!(alpha_ratio >= 0.0)) throw Error(Errc::invalid_parameter, "alpha_ratio must be >= 0");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t h) { return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53; }  // (0, 1]

}  // namespace

double grid_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t index) {
  const std::uint64_t h1 = splitmix64(splitmix64(splitmix64(seed) ^ channel) ^ index);
  const std::uint64_t h2 = splitmix64(h1);
  return std::sqrt(-2.0 * std::log(unit_open(h1))) * std::cos(2.0 * pi * unit_open(h2));
}

double PinkFilter::step(double x) {
  const double y = b[0] * x + z[0];
  z[0] = b[1] * x - a[1] * y + z[1];
  z[1] = b[2] * x - a[2] * y + z[2];
  z[2] = b[3] * x - a[3] * y;
  return y;
}

double PinkFilter::gain() {
  static const double g = [] {
    PinkFilter f;
    double ss = 0.0;
    for (int n = 0; n < 50000; ++n) {
      const double h = f.step(n == 0 ? 1.0 : 0.0);
      ss += h * h;
    }
    return std::sqrt(ss);
  }();
  return g;
}

Generator::Generator(GeneratorConfig config) : config_(config) {
  config_.check();
  names_ = default_channel_names(config_.channels);
  if (config_.mode == GenMode::simulation) {
    pink_.resize(config_.channels);
    pink_norm_ = 1.0 / PinkFilter::gain();
    for (std::size_t c = 0; c < config_.channels; ++c) {
      // Index 2^63 is far outside any realistic sample stream.
      const double u = std::erfc(-grid_normal(config_.seed ^ 0xA1FAull, c, 1ull << 63) / std::sqrt(2.0)) / 2.0;
      phase_.push_back(2.0 * pi * u);
    }
  }
}

Chunk Generator::generate_until(double to_t) {
  const double end = std::ceil(to_t * config_.fs - 1e-7);
  if (!(end > static_cast<double>(next_))) return generate(next_, 0);
  return generate(next_, static_cast<std::size_t>(end - static_cast<double>(next_)));
}

Chunk Generator::generate(std::uint64_t first, std::size_t count) {
  if (config_.mode == GenMode::simulation && first != next_) {
    throw Error(Errc::invalid_parameter, "simulation mode generates sequentially");
  }
  Chunk out;
  out.channel_names = names_;
  out.sampling_rate = config_.fs;
  out.data.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(config_.channels));
  out.timestamps.resize(count);
  const double alpha_amp = config_.alpha_ratio * std::sqrt(2.0);  // sinusoid RMS = amp / sqrt(2)
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t n = first + i;
    const double t = static_cast<double>(n) / config_.fs;
    out.timestamps[i] = t;
    for (std::size_t c = 0; c < config_.channels; ++c) {
      double v = 0.0;
      switch (config_.mode) {
        case GenMode::random: v = config_.amplitude * grid_normal(config_.seed, c, n); break;
        case GenMode::oscillator: v = config_.amplitude * std::sin(2.0 * pi * config_.freq * t); break;
        case GenMode::simulation: {
          const double pink = pink_[c].step(grid_normal(config_.seed, c, n)) * pink_norm_;
          v = config_.amplitude * (pink + alpha_amp * std::sin(2.0 * pi * config_.freq * t + phase_[c]));
          break;
        }
      }
      out.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  next_ = std::max(next_, first + count);
  return out;
}

}  // namespace nxs::synth
