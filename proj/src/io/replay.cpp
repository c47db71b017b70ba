#include "nxs/io/replay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::io {

namespace {
constexpr double kSlack = 1e-9;  // absorbs rounding in t - t_first + period
}  // namespace

Replayer::Replayer(const Recording& recording, double rate) : rate_(rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::invalid_parameter, fmt::format("rate {} must be > 0", rate));
  double first = std::numeric_limits<double>::infinity();
  for (const auto& s : recording.streams) {
    if (!s.timestamps.empty()) first = std::min(first, s.timestamps.front());
  }
  t_first_ = std::isfinite(first) ? first : 0.0;

  for (const auto& s : recording.streams) {
    if (s.kind == StreamKind::signal) {
      if (!(s.fs > 0.0)) throw Error(Errc::invalid_parameter, fmt::format("signal stream '{}' has no sampling rate", s.name));
      const auto piece = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.032 * s.fs)));
      signals_.push_back({&s, 0, piece});
      if (!s.timestamps.empty()) {
        end_time_ = std::max(end_time_, (s.timestamps.back() - t_first_ + 1.0 / s.fs) / rate_);
      }
    } else {
      for (const auto& m : s.markers) {
        MarkerEvent e = m;
        e.timestamp = (m.timestamp - t_first_) / rate_;
        markers_.push_back(std::move(e));
      }
    }
  }
  std::stable_sort(markers_.begin(), markers_.end(),
                   [](const MarkerEvent& a, const MarkerEvent& b) { return a.timestamp < b.timestamp; });
  if (!markers_.empty()) end_time_ = std::max(end_time_, markers_.back().timestamp);
}

bool Replayer::done() const noexcept {
  if (next_marker_ < markers_.size()) return false;
  return std::all_of(signals_.begin(), signals_.end(),
                     [](const Cursor& c) { return c.next >= c.stream->timestamps.size(); });
}

ReplayBatch Replayer::emit_due(double clock) {
  ReplayBatch batch;
  batch.signals.resize(signals_.size());
  for (std::size_t i = 0; i < signals_.size(); ++i) {
    Cursor& cur = signals_[i];
    const RecordedStream& s = *cur.stream;
    const double period = 1.0 / s.fs;
    std::size_t end = cur.next;
    while (end < s.timestamps.size() && (s.timestamps[end] - t_first_ + period) / rate_ <= clock + kSlack) ++end;
    for (std::size_t start = cur.next; start < end; start += cur.piece) {
      const std::size_t n = std::min(cur.piece, end - start);
      Chunk c;
      c.channel_names = s.channel_names;
      c.sampling_rate = s.fs * rate_;
      c.data = s.samples.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n));
      c.timestamps.reserve(n);
      for (std::size_t k = start; k < start + n; ++k) c.timestamps.push_back((s.timestamps[k] - t_first_) / rate_);
      batch.signals[i].push_back(std::move(c));
    }
    cur.next = end;
  }
  while (next_marker_ < markers_.size() && markers_[next_marker_].timestamp <= clock + kSlack) {
    batch.markers.push_back(markers_[next_marker_++]);
  }
  return batch;
}

}  // namespace nxs::io
