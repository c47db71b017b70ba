#include "nxs/dsp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::dsp {

using std::numbers::pi;

WindowKind parse_window(std::string_view name) {
  if (name == "blackman") return WindowKind::blackman;
  if (name == "hanning" || name == "hann") return WindowKind::hanning;
  if (name == "hamming") return WindowKind::hamming;
  if (name == "triangular" || name == "triang") return WindowKind::triangular;
  throw Error(Errc::invalid_parameter,
              fmt::format("unknown window '{}' (blackman, hanning, hamming, triangular)", name));
}

std::string_view to_string(WindowKind kind) noexcept {
  switch (kind) {
    case WindowKind::blackman: return "blackman";
    case WindowKind::hanning: return "hanning";
    case WindowKind::hamming: return "hamming";
    case WindowKind::triangular: return "triangular";
  }
  return "?";
}

namespace {

std::vector<double> symmetric_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n <= 1) return w;
  const double m = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / m;
    switch (kind) {
      case WindowKind::hanning: w[i] = 0.5 - 0.5 * std::cos(t); break;
      case WindowKind::hamming: w[i] = 0.54 - 0.46 * std::cos(t); break;
      case WindowKind::blackman: w[i] = 0.42 - 0.5 * std::cos(t) + 0.08 * std::cos(2.0 * t); break;
      case WindowKind::triangular: {
        // Non-zero endpoints; matches the common "triang" definition.
        const double nn = static_cast<double>(n);
        const double k = static_cast<double>(std::min(i, n - 1 - i)) + 1.0;
        w[i] = n % 2 == 0 ? (2.0 * k - 1.0) / nn : 2.0 * k / (nn + 1.0);
        break;
      }
    }
  }
  return w;
}

std::vector<double> column(const SampleTable& t, Eigen::Index c) {
  std::vector<double> v(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index r = 0; r < t.rows(); ++r) v[static_cast<std::size_t>(r)] = t(r, c);
  return v;
}

}  // namespace

std::vector<double> make_window(WindowKind kind, std::size_t n, bool periodic) {
  if (!periodic) return symmetric_window(kind, n);
  auto w = symmetric_window(kind, n + 1);
  w.pop_back();
  return w;
}

SpectrumFrame fft_magnitude(const Epoch& epoch) {
  if (epoch.rows() < 2) throw Error(Errc::empty_epoch, fmt::format("FFT needs >= 2 samples, got {}", epoch.rows()));
  const std::size_t n = epoch.rows();
  const std::size_t bins = n / 2 + 1;
  SpectrumFrame out;
  out.timestamp = epoch.onset;
  out.channel_names = epoch.channel_names;
  out.scaling = SpectrumScaling::magnitude;
  out.values.resize(epoch.data.cols(), static_cast<Eigen::Index>(bins));
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequencies.push_back(static_cast<double>(k) * epoch.sampling_rate / static_cast<double>(n));
  }
  for (Eigen::Index c = 0; c < epoch.data.cols(); ++c) {
    const auto spec = rfft(column(epoch.data, c));
    for (std::size_t k = 0; k < bins; ++k) out.values(c, static_cast<Eigen::Index>(k)) = std::abs(spec[k]);
  }
  return out;
}

void WelchParams::check() const {
  if (segment_length < 8) {
    throw Error(Errc::invalid_parameter, fmt::format("segment_length {} < 8", segment_length));
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw Error(Errc::invalid_parameter, fmt::format("overlap {} outside [0, 1)", overlap));
  }
}

std::vector<double> welch_frequencies(double fs, const WelchParams& params) {
  std::vector<double> f;
  const std::size_t bins = params.segment_length / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k) f.push_back(static_cast<double>(k) * fs / static_cast<double>(params.segment_length));
  return f;
}

SampleTable welch_psd(const SampleTable& data, double fs, const WelchParams& params) {
  params.check();
  const std::size_t len = params.segment_length;
  const auto rows = static_cast<std::size_t>(data.rows());
  if (rows < len) throw Error(Errc::too_short, fmt::format("input has {} samples, segment_length is {}", rows, len));

  const auto win = make_window(params.window, len, true);
  const double wsum2 = std::inner_product(win.begin(), win.end(), win.begin(), 0.0);
  const double scale = 1.0 / (fs * wsum2);
  const std::size_t step = len - static_cast<std::size_t>(std::llround(params.overlap * static_cast<double>(len)));
  const std::size_t nseg = (rows - len) / step + 1;
  const std::size_t bins = len / 2 + 1;

  SampleTable out = SampleTable::Zero(data.cols(), static_cast<Eigen::Index>(bins));
  std::vector<double> seg(len);
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    for (std::size_t s = 0; s < nseg; ++s) {
      const std::size_t start = s * step;
      double mean = 0.0;
      for (std::size_t i = 0; i < len; ++i) mean += data(static_cast<Eigen::Index>(start + i), c);
      mean /= static_cast<double>(len);
      for (std::size_t i = 0; i < len; ++i) seg[i] = (data(static_cast<Eigen::Index>(start + i), c) - mean) * win[i];
      const auto spec = rfft(seg);
      for (std::size_t k = 0; k < bins; ++k) out(c, static_cast<Eigen::Index>(k)) += std::norm(spec[k]);
    }
  }
  out *= scale / static_cast<double>(nseg);
  // One-sided: double everything except DC and (for even lengths) Nyquist.
  const std::size_t last = len % 2 == 0 ? bins - 1 : bins;
  for (std::size_t k = 1; k < last; ++k) out.col(static_cast<Eigen::Index>(k)) *= 2.0;
  return out;
}

SpectrumFrame welch_psd(const Epoch& epoch, const WelchParams& params) {
  SpectrumFrame out;
  out.timestamp = epoch.onset;
  out.channel_names = epoch.channel_names;
  out.scaling = SpectrumScaling::density;
  out.values = welch_psd(epoch.data, epoch.sampling_rate, params);
  out.frequencies = welch_frequencies(epoch.sampling_rate, params);
  return out;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> cx(x.begin(), x.end());
  auto spec = fft(cx);
  // h: 1 at DC (and Nyquist for even n), 2 for positive, 0 for negative.
  for (std::size_t k = 1; k < n; ++k) {
    const bool nyquist = n % 2 == 0 && k == n / 2;
    if (nyquist) continue;
    spec[k] *= k < (n + 1) / 2 ? 2.0 : 0.0;
  }
  auto out = fft(spec, true);
  for (std::size_t i = 0; i < n; ++i) out[i] = {x[i], out[i].imag() / static_cast<double>(n)};
  return out;
}

HilbertResult hilbert_analytic(const Epoch& epoch) {
  if (epoch.rows() < 8) throw Error(Errc::empty_epoch, fmt::format("Hilbert needs >= 8 samples, got {}", epoch.rows()));
  HilbertResult r{epoch, epoch};
  for (Eigen::Index c = 0; c < epoch.data.cols(); ++c) {
    const auto a = analytic_signal(column(epoch.data, c));
    for (Eigen::Index i = 0; i < epoch.data.rows(); ++i) {
      r.envelope.data(i, c) = std::abs(a[static_cast<std::size_t>(i)]);
      r.phase.data(i, c) = std::arg(a[static_cast<std::size_t>(i)]);
    }
  }
  return r;
}

Epoch apply_window(const Epoch& epoch, WindowKind kind) {
  if (epoch.rows() == 0) throw Error(Errc::empty_epoch, "cannot window an empty epoch");
  const auto w = make_window(kind, epoch.rows());
  Epoch out = epoch;
  for (Eigen::Index r = 0; r < out.data.rows(); ++r) out.data.row(r) *= w[static_cast<std::size_t>(r)];
  return out;
}

Stat parse_stat(std::string_view name, double p) {
  static constexpr std::pair<std::string_view, StatKind> names[] = {
      {"mean", StatKind::mean}, {"median", StatKind::median}, {"min", StatKind::min},
      {"max", StatKind::max},   {"range", StatKind::range},   {"std", StatKind::std},
      {"quantile", StatKind::quantile}, {"iqr", StatKind::iqr}};
  for (const auto& [n, k] : names) {
    if (n == name) {
      if (k == StatKind::quantile && !(p >= 0.0 && p <= 1.0)) {
        throw Error(Errc::invalid_parameter, fmt::format("quantile p={} outside [0, 1]", p));
      }
      return {k, p};
    }
  }
  throw Error(Errc::invalid_parameter,
              fmt::format("unknown statistic '{}' (mean, median, min, max, range, std, quantile, iqr)", name));
}

std::string_view to_string(StatKind kind) noexcept {
  switch (kind) {
    case StatKind::mean: return "mean";
    case StatKind::median: return "median";
    case StatKind::min: return "min";
    case StatKind::max: return "max";
    case StatKind::range: return "range";
    case StatKind::std: return "std";
    case StatKind::quantile: return "quantile";
    case StatKind::iqr: return "iqr";
  }
  return "?";
}

double quantile_sorted(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

double compute_stat(std::span<const double> v, const Stat& stat) {
  if (v.empty()) throw Error(Errc::empty_epoch, "statistic of an empty sequence");
  const double n = static_cast<double>(v.size());
  switch (stat.kind) {
    case StatKind::mean: return std::accumulate(v.begin(), v.end(), 0.0) / n;
    case StatKind::min: return *std::min_element(v.begin(), v.end());
    case StatKind::max: return *std::max_element(v.begin(), v.end());
    case StatKind::range: {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *hi - *lo;
    }
    case StatKind::std: {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return std::sqrt(ss / n);
    }
    case StatKind::median:
    case StatKind::quantile:
    case StatKind::iqr: {
      std::vector<double> s(v.begin(), v.end());
      std::sort(s.begin(), s.end());
      if (stat.kind == StatKind::median) return quantile_sorted(s, 0.5);
      if (stat.kind == StatKind::quantile) return quantile_sorted(s, stat.p);
      return quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    }
  }
  return 0.0;
}

FeatureVector univariate_stat(const Epoch& epoch, const Stat& stat) {
  if (epoch.rows() == 0) throw Error(Errc::empty_epoch, "statistic of an empty epoch");
  FeatureVector fv;
  fv.timestamp = epoch.onset;
  if (epoch.trigger) fv.label = epoch.trigger->label;
  for (Eigen::Index c = 0; c < epoch.data.cols(); ++c) {
    fv.values.push_back(compute_stat(column(epoch.data, c), stat));
    fv.names.push_back(fmt::format("{}:{}", to_string(stat.kind), epoch.channel_names[static_cast<std::size_t>(c)]));
  }
  return fv;
}

}  // namespace nxs::dsp
