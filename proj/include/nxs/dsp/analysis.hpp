#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::dsp {

// FFT primitives (FFTW-backed, plans cached per thread and size).

/// Non-negative-frequency half of the DFT: bins 0..n/2.
std::vector<std::complex<double>> rfft(std::span<const double> x);
/// Full complex DFT; `inverse` is unnormalised.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x, bool inverse = false);

enum class WindowKind { blackman, hanning, hamming, triangular };

WindowKind parse_window(std::string_view name);
std::string_view to_string(WindowKind kind) noexcept;

/// Window of length n. Symmetric by default; `periodic` drops the final
/// point of an n+1 symmetric window (the DFT-even form used for spectra).
std::vector<double> make_window(WindowKind kind, std::size_t n, bool periodic = false);

/// Magnitude of the DFT at k*fs/N for k = 0..N/2, per channel. The frame's
/// timestamp is the epoch onset. Throws Errc::empty_epoch below 2 samples.
SpectrumFrame fft_magnitude(const Epoch& epoch);

struct WelchParams {
  std::size_t segment_length = 256;
  double overlap = 0.5;
  WindowKind window = WindowKind::hanning;

  void check() const;
};

/// Welch PSD of each column of `data` (samples x channels): constant detrend
/// per segment, periodic window, one-sided density scaling in units^2/Hz.
/// Result rows are channels, columns are bins at k*fs/segment_length.
/// Throws Errc::too_short when fewer rows than segment_length.
SampleTable welch_psd(const SampleTable& data, double fs, const WelchParams& params);
std::vector<double> welch_frequencies(double fs, const WelchParams& params);
SpectrumFrame welch_psd(const Epoch& epoch, const WelchParams& params);

/// Analytic signal by the frequency-domain method. The real part is the
/// input, bit for bit.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

struct HilbertResult {
  Epoch envelope;
  Epoch phase;  // radians in (-pi, pi]
};

/// Throws Errc::empty_epoch below 8 samples.
HilbertResult hilbert_analytic(const Epoch& epoch);

Epoch apply_window(const Epoch& epoch, WindowKind kind);

enum class StatKind { mean, median, min, max, range, std, quantile, iqr };

struct Stat {
  StatKind kind = StatKind::mean;
  double p = 0.5;  // quantile only
};

Stat parse_stat(std::string_view name, double p = 0.5);
std::string_view to_string(StatKind kind) noexcept;

/// Quantile of sorted data with linear interpolation between order
/// statistics at position p*(n-1).
double quantile_sorted(std::span<const double> sorted, double p);

/// Statistic of one sequence; std is the population form (divide by n).
double compute_stat(std::span<const double> values, const Stat& stat);

/// One value per channel, named "<stat>:<channel>"; timestamp is the epoch
/// onset and the label is the trigger label when present.
FeatureVector univariate_stat(const Epoch& epoch, const Stat& stat);

}  // namespace nxs::dsp
