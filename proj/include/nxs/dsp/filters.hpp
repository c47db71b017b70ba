#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::dsp {

/// One second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct SosCascade {
  std::vector<Biquad> sections;

  /// Complex frequency response at `freq` Hz.
  std::complex<double> response(double freq, double fs) const;
  double gain(double freq, double fs) const { return std::abs(response(freq, fs)); }
  /// Roots of every section denominator.
  std::vector<std::complex<double>> poles() const;
};

/// Digital Butterworth band-pass: analog low-pass prototype of `order`,
/// pre-warped low-pass to band-pass transform, bilinear transform, grouped
/// into `order` sections with unit gain at the geometric band centre. The
/// resulting filter has order 2*order. Requires 0 < lowcut < highcut < fs/2
/// and 1 <= order <= 16.
SosCascade design_butter_bandpass(double lowcut, double highcut, int order, double fs);

/// Digital Butterworth low-pass with unit DC gain.
SosCascade design_butter_lowpass(double cutoff, int order, double fs);

/// Single-biquad notch (unity gain at DC and Nyquist); `q` = freq / bandwidth.
SosCascade design_notch(double freq, double q, double fs);

/// Streaming cascade: transposed direct form II per channel, 64-bit state,
/// zero initial conditions. State is sized from the first chunk.
class SosFilter {
 public:
  explicit SosFilter(SosCascade cascade);

  void process(SampleTable& data);
  Chunk apply(const Chunk& chunk);
  void reset();

  const SosCascade& cascade() const noexcept { return cascade_; }
  std::size_t channels() const noexcept { return channels_; }
  const std::vector<double>& state() const noexcept { return state_; }

 private:
  SosCascade cascade_;
  std::vector<double> state_;
  std::size_t channels_ = 0;
  bool sized_ = false;
};

/// Integer-factor decimator: order 8 Butterworth anti-alias low-pass at
/// 0.8 * fs / (2 * factor), then keeps samples whose global index is a
/// multiple of the factor. The filter is designed from the first chunk's rate.
class Decimator {
 public:
  explicit Decimator(int factor);

  Chunk apply(const Chunk& chunk);

  int factor() const noexcept { return factor_; }
  int phase() const noexcept { return phase_; }

 private:
  int factor_;
  int phase_ = 0;
  double fs_ = 0.0;
  std::optional<SosFilter> filter_;
};

}  // namespace nxs::dsp
