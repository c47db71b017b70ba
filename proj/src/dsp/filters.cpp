#include "nxs/dsp/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::dsp {

using cplx = std::complex<double>;
using std::numbers::pi;

std::complex<double> SosCascade::response(double freq, double fs) const {
  const cplx z1 = std::polar(1.0, -2.0 * pi * freq / fs);  // z^-1
  const cplx z2 = z1 * z1;
  cplx h = 1.0;
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

std::vector<std::complex<double>> SosCascade::poles() const {
  std::vector<cplx> out;
  for (const auto& s : sections) {
    // z^2 + a1 z + a2 = 0
    if (s.a2 == 0.0) {
      out.emplace_back(-s.a1, 0.0);
      continue;
    }
    const cplx disc = std::sqrt(cplx(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

namespace {

void check_order(int order) {
  if (order < 1 || order > 16) throw Error(Errc::invalid_band, fmt::format("order {} outside [1, 16]", order));
}

void check_stable(const SosCascade& c) {
  for (const auto& p : c.poles()) {
    if (!(std::abs(p) < 1.0)) {
      throw Error(Errc::unstable_design, fmt::format("pole radius {} >= 1", std::abs(p)));
    }
  }
}

/// Left-half-plane Butterworth prototype poles, unit cutoff.
std::vector<cplx> prototype_poles(int order) {
  std::vector<cplx> p;
  for (int k = 0; k < order; ++k) {
    const double theta = pi * (2.0 * k + order + 1) / (2.0 * order);
    p.push_back(std::polar(1.0, theta));
  }
  return p;
}

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

/// Groups poles into conjugate pairs (complex) and adjacent pairs (real).
std::vector<std::pair<cplx, cplx>> pair_poles(std::vector<cplx> poles) {
  constexpr double eps = 1e-12;
  std::vector<std::pair<cplx, cplx>> pairs;
  std::vector<cplx> reals;
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    if (std::abs(poles[i].imag()) <= eps * std::max(1.0, std::abs(poles[i]))) {
      reals.push_back(cplx(poles[i].real(), 0.0));
      used[i] = true;
      continue;
    }
    used[i] = true;
    std::size_t best = poles.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(poles[j] - std::conj(poles[i]));
      if (best == poles.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == poles.size()) throw Error(Errc::unstable_design, "unpaired complex pole");
    used[best] = true;
    pairs.emplace_back(poles[i], std::conj(poles[i]));
  }
  std::sort(reals.begin(), reals.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) pairs.emplace_back(reals[i], reals[i + 1]);
  if (reals.size() % 2 == 1) pairs.emplace_back(reals.back(), cplx(0.0, 0.0));
  return pairs;
}

Biquad denominator(const std::pair<cplx, cplx>& pr, Biquad b) {
  // (1 - p1 z^-1)(1 - p2 z^-1)
  b.a1 = -(pr.first + pr.second).real();
  b.a2 = (pr.first * pr.second).real();
  return b;
}

void normalise_section(Biquad& s, double freq, double fs) {
  SosCascade one{{s}};
  const double g = one.gain(freq, fs);
  s.b0 /= g;
  s.b1 /= g;
  s.b2 /= g;
}

}  // namespace

SosCascade design_butter_bandpass(double lowcut, double highcut, int order, double fs) {
  if (!(fs > 0.0)) throw Error(Errc::invalid_band, "sampling rate must be positive");
  if (!(lowcut > 0.0 && lowcut < highcut && highcut < fs / 2.0)) {
    throw Error(Errc::invalid_band,
                fmt::format("need 0 < lowcut < highcut < fs/2, got lowcut={} highcut={} fs={}", lowcut, highcut, fs));
  }
  check_order(order);

  const double w1 = 2.0 * fs * std::tan(pi * lowcut / fs);
  const double w2 = 2.0 * fs * std::tan(pi * highcut / fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  std::vector<cplx> zpoles;
  for (const cplx p : prototype_poles(order)) {
    const cplx a = p * bw / 2.0;
    const cplx root = std::sqrt(a * a - w0sq);
    zpoles.push_back(bilinear(a + root, fs));
    zpoles.push_back(bilinear(a - root, fs));
  }

  const double center = fs / pi * std::atan(std::sqrt(w0sq) / (2.0 * fs));
  SosCascade out;
  for (const auto& pr : pair_poles(std::move(zpoles))) {
    Biquad s = denominator(pr, Biquad{1.0, 0.0, -1.0, 0.0, 0.0});
    normalise_section(s, center, fs);
    out.sections.push_back(s);
  }
  check_stable(out);
  return out;
}

SosCascade design_butter_lowpass(double cutoff, int order, double fs) {
  if (!(fs > 0.0 && cutoff > 0.0 && cutoff < fs / 2.0)) {
    throw Error(Errc::invalid_band, fmt::format("need 0 < cutoff < fs/2, got cutoff={} fs={}", cutoff, fs));
  }
  check_order(order);
  const double wc = 2.0 * fs * std::tan(pi * cutoff / fs);
  std::vector<cplx> zpoles;
  for (const cplx p : prototype_poles(order)) zpoles.push_back(bilinear(p * wc, fs));

  SosCascade out;
  for (const auto& pr : pair_poles(std::move(zpoles))) {
    const bool first_order = pr.second == cplx(0.0, 0.0) && (order % 2 == 1) && pr.first.imag() == 0.0 &&
                             out.sections.size() == static_cast<std::size_t>(order / 2);
    Biquad s = first_order ? Biquad{1.0, 1.0, 0.0, 0.0, 0.0} : Biquad{1.0, 2.0, 1.0, 0.0, 0.0};
    s = denominator(pr, s);
    normalise_section(s, 0.0, fs);
    out.sections.push_back(s);
  }
  check_stable(out);
  return out;
}

SosCascade design_notch(double freq, double q, double fs) {
  if (!(fs > 0.0 && freq > 0.0 && freq < fs / 2.0)) {
    throw Error(Errc::invalid_band, fmt::format("need 0 < freq < fs/2, got freq={} fs={}", freq, fs));
  }
  if (!(q > 0.0)) throw Error(Errc::invalid_band, "quality factor must be positive");
  const double w0 = 2.0 * pi * freq / fs;
  const double bw = w0 / q;
  const double beta = std::tan(bw / 2.0);  // gain at band edges = 1/sqrt(2)
  const double g = 1.0 / (1.0 + beta);
  Biquad s{g, -2.0 * g * std::cos(w0), g, -2.0 * g * std::cos(w0), 2.0 * g - 1.0};
  SosCascade out{{s}};
  check_stable(out);
  return out;
}

SosFilter::SosFilter(SosCascade cascade) : cascade_(std::move(cascade)) {}

void SosFilter::reset() {
  std::fill(state_.begin(), state_.end(), 0.0);
}

void SosFilter::process(SampleTable& data) {
  const auto channels = static_cast<std::size_t>(data.cols());
  if (!sized_) {
    channels_ = channels;
    state_.assign(2 * cascade_.sections.size() * channels_, 0.0);
    sized_ = true;
  } else if (channels != channels_) {
    throw Error(Errc::channel_count_changed,
                fmt::format("filter state has {} channels, chunk has {}", channels_, channels));
  }
  const std::size_t nsec = cascade_.sections.size();
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < channels_; ++c) {
      double x = data(r, static_cast<Eigen::Index>(c));
      double* z = &state_[2 * nsec * c];
      for (std::size_t k = 0; k < nsec; ++k, z += 2) {
        const Biquad& s = cascade_.sections[k];
        const double y = s.b0 * x + z[0];
        z[0] = s.b1 * x - s.a1 * y + z[1];
        z[1] = s.b2 * x - s.a2 * y;
        x = y;
      }
      data(r, static_cast<Eigen::Index>(c)) = x;
    }
  }
}

Chunk SosFilter::apply(const Chunk& chunk) {
  Chunk out = chunk;
  process(out.data);
  return out;
}

Decimator::Decimator(int factor) : factor_(factor) {
  if (factor < 2) throw Error(Errc::invalid_parameter, fmt::format("decimation factor {} < 2", factor));
}

Chunk Decimator::apply(const Chunk& chunk) {
  if (!chunk.regular()) throw Error(Errc::invalid_parameter, "decimation needs a regularly sampled stream");
  if (!filter_) {
    fs_ = chunk.sampling_rate;
    filter_.emplace(design_butter_lowpass(0.8 * fs_ / (2.0 * factor_), 8, fs_));
  }
  SampleTable filtered = chunk.data;
  filter_->process(filtered);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < filtered.rows(); ++r) {
    if (phase_ == 0) keep.push_back(r);
    phase_ = (phase_ + 1) % factor_;
  }
  Chunk out;
  out.channel_names = chunk.channel_names;
  out.sampling_rate = fs_ / factor_;
  out.data.resize(static_cast<Eigen::Index>(keep.size()), filtered.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.data.row(static_cast<Eigen::Index>(i)) = filtered.row(keep[i]);
    out.timestamps.push_back(chunk.timestamps[static_cast<std::size_t>(keep[i])]);
  }
  return out;
}

}  // namespace nxs::dsp
