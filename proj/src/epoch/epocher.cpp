#include "nxs/epoch/epocher.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nxs/error.hpp"
#include "nxs/log.hpp"

namespace nxs::epoch {

bool StimCode::matches(const MarkerEvent& m) const {
  if (label && m.label == *label) return true;
  return code && m.code && *m.code == *code;
}

std::string StimCode::to_string() const {
  if (label && code) return fmt::format("{} ({})", *label, *code);
  if (label) return *label;
  return code ? std::to_string(*code) : std::string("<any>");
}

Epocher Epocher::time_based(double duration, double interval) {
  if (!(interval > 0.0)) throw Error(Errc::invalid_parameter, fmt::format("interval {} must be > 0", interval));
  return Epocher(Mode::time, duration, interval, 0.0, std::nullopt);
}

Epocher Epocher::marker_based(double duration, double offset, std::optional<StimCode> filter) {
  if (!(offset >= 0.0)) throw Error(Errc::invalid_parameter, fmt::format("offset {} must be >= 0", offset));
  return Epocher(Mode::marker, duration, 0.0, offset, std::move(filter));
}

Epocher::Epocher(Mode mode, double duration, double interval, double offset, std::optional<StimCode> filter)
    : mode_(mode), duration_(duration), interval_(interval), offset_(offset), filter_(std::move(filter)) {
  if (!(duration > 0.0)) throw Error(Errc::invalid_parameter, fmt::format("duration {} must be > 0", duration));
}

void Epocher::add_markers(const std::vector<MarkerEvent>& markers) {
  if (mode_ != Mode::marker) return;
  for (const auto& m : markers) {
    if (filter_ && !filter_->matches(m)) {
      ++counters_.ignored_markers;
      continue;
    }
    Pending p{m.timestamp + offset_, m};
    auto pos = std::upper_bound(pending_.begin(), pending_.end(), p.onset,
                                [](double t, const Pending& q) { return t < q.onset; });
    pending_.insert(pos, std::move(p));
  }
}

void Epocher::append(const Chunk& chunk) {
  if (chunk.empty()) return;
  if (!chunk.regular()) throw Error(Errc::invalid_parameter, "epoching needs a regularly sampled stream");
  if (!first_ts_) {
    fs_ = chunk.sampling_rate;
    names_ = chunk.channel_names;
    channels_ = chunk.channels();
    rows_ = static_cast<std::size_t>(std::llround(duration_ * fs_));
    if (rows_ == 0) throw Error(Errc::invalid_parameter, "duration is shorter than one sample");
    capacity_ = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(2.0 * (duration_ + offset_) * fs_)),
                                      static_cast<std::size_t>(std::ceil(fs_)));
    first_ts_ = chunk.timestamps.front();
  } else if (chunk.channels() != channels_) {
    throw Error(Errc::channel_count_changed,
                fmt::format("epocher started with {} channels, chunk has {}", channels_, chunk.channels()));
  }
  for (std::size_t r = 0; r < chunk.rows(); ++r) {
    ts_.push_back(chunk.timestamps[r]);
    for (std::size_t c = 0; c < channels_; ++c) {
      values_.push_back(chunk.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
  }
}

void Epocher::schedule_time_onsets() {
  if (mode_ != Mode::time || !first_ts_ || ts_.empty()) return;
  while (true) {
    const double onset = *first_ts_ + static_cast<double>(next_k_) * interval_;
    if (onset > ts_.back()) break;
    pending_.push_back({onset, std::nullopt});
    ++next_k_;
  }
}

std::optional<std::uint64_t> Epocher::locate(double onset) const {
  const double eps = 1e-3 / fs_;
  const auto it = std::lower_bound(ts_.begin(), ts_.end(), onset - eps);
  if (it == ts_.end()) return std::nullopt;
  return base_ + static_cast<std::uint64_t>(it - ts_.begin());
}

Epoch Epocher::extract(std::uint64_t start, double onset, const std::optional<MarkerEvent>& trigger) const {
  Epoch e;
  e.onset = onset;
  e.trigger = trigger;
  e.channel_names = names_;
  e.sampling_rate = fs_;
  e.data.resize(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(channels_));
  const std::size_t off = static_cast<std::size_t>(start - base_);
  for (std::size_t r = 0; r < rows_; ++r) {
    e.timestamps.push_back(ts_[off + r]);
    for (std::size_t c = 0; c < channels_; ++c) {
      e.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values_[(off + r) * channels_ + c];
    }
  }
  return e;
}

std::vector<Epoch> Epocher::drain() {
  std::vector<Epoch> out;
  if (!first_ts_) return out;
  const double eps = 1e-3 / fs_;
  schedule_time_onsets();
  while (!pending_.empty()) {
    const Pending& p = pending_.front();
    const bool evicted = last_evicted_ts_ && p.onset - eps <= *last_evicted_ts_;
    const bool precedes_stream = p.onset < *first_ts_ - 0.5 / fs_;
    if (evicted || precedes_stream) {
      ++counters_.skipped_before_buffer;
      logger().warn("epoching: trigger at {:.6f} s is older than the retained samples; skipped", p.onset);
      pending_.pop_front();
      continue;
    }
    const auto start = locate(p.onset);
    if (!start || *start + rows_ > base_ + ts_.size()) break;
    out.push_back(extract(*start, p.onset, p.trigger));
    ++counters_.emitted;
    pending_.pop_front();
  }
  return out;
}

void Epocher::evict() {
  while (ts_.size() > capacity_) {
    last_evicted_ts_ = ts_.front();
    ts_.pop_front();
    values_.erase(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(channels_));
    ++base_;
  }
  const double eps = fs_ > 0.0 ? 1e-3 / fs_ : 0.0;
  while (!pending_.empty() && last_evicted_ts_ && pending_.front().onset - eps <= *last_evicted_ts_) {
    ++counters_.dropped_on_overflow;
    logger().warn("epoching: buffer overflow dropped the trigger at {:.6f} s", pending_.front().onset);
    pending_.pop_front();
  }
}

std::vector<Epoch> Epocher::push(const Chunk& chunk) {
  append(chunk);
  auto out = drain();
  evict();
  return out;
}

std::vector<Epoch> Epocher::poll() {
  auto out = drain();
  evict();
  return out;
}

}  // namespace nxs::epoch
