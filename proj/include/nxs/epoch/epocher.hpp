#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::epoch {

/// Marker filter for stimulation-based epoching: matches on label, on the
/// integer code, or on either.
struct StimCode {
  std::optional<std::string> label;
  std::optional<std::int32_t> code;

  bool matches(const MarkerEvent& m) const;
  std::string to_string() const;
};

struct EpocherCounters {
  std::uint64_t emitted = 0;
  std::uint64_t skipped_before_buffer = 0;  // trigger older than retained samples
  std::uint64_t dropped_on_overflow = 0;    // pending trigger evicted by buffer overflow
  std::uint64_t ignored_markers = 0;        // did not match the stim code
};

/// Cuts fixed-length epochs out of a continuous stream. Samples are kept in
/// a ring buffer of 2 * (duration + offset) * fs samples (at least 1 s); an
/// epoch starts at the first sample whose timestamp is >= its onset and is
/// emitted once round(duration * fs) samples from there exist.
class Epocher {
 public:
  /// Onsets t0, t0 + interval, ... with t0 the first sample received.
  static Epocher time_based(double duration, double interval);
  /// One epoch per marker (or per matching marker when `filter` is set),
  /// onset = marker timestamp + offset, offset >= 0.
  static Epocher marker_based(double duration, double offset = 0.0, std::optional<StimCode> filter = std::nullopt);

  /// Queues triggers. Call before push() in the same step so markers that
  /// arrive together with their samples are honoured immediately.
  void add_markers(const std::vector<MarkerEvent>& markers);

  /// Appends samples and returns every epoch completed so far.
  std::vector<Epoch> push(const Chunk& chunk);
  /// Emits whatever queued triggers the buffered samples already satisfy.
  std::vector<Epoch> poll();

  double duration() const noexcept { return duration_; }
  std::size_t epoch_rows() const noexcept { return rows_; }
  std::size_t pending() const noexcept { return pending_.size(); }
  const EpocherCounters& counters() const noexcept { return counters_; }

 private:
  enum class Mode { time, marker };
  struct Pending {
    double onset;
    std::optional<MarkerEvent> trigger;
  };

  Epocher(Mode mode, double duration, double interval, double offset, std::optional<StimCode> filter);

  void append(const Chunk& chunk);
  void evict();
  void schedule_time_onsets();
  /// Global index of the first sample with timestamp >= onset, if buffered.
  std::optional<std::uint64_t> locate(double onset) const;
  Epoch extract(std::uint64_t start, double onset, const std::optional<MarkerEvent>& trigger) const;
  std::vector<Epoch> drain();

  Mode mode_;
  double duration_;
  double interval_;
  double offset_;
  std::optional<StimCode> filter_;

  double fs_ = 0.0;
  std::size_t rows_ = 0;
  std::size_t capacity_ = 0;
  std::vector<std::string> names_;
  std::size_t channels_ = 0;

  std::deque<double> ts_;
  std::deque<double> values_;  // row-major, channels_ per sample
  std::uint64_t base_ = 0;     // global index of ts_.front()
  std::optional<double> first_ts_;
  std::optional<double> last_evicted_ts_;

  std::uint64_t next_k_ = 0;  // time mode: next onset = first_ts + k * interval
  std::deque<Pending> pending_;
  EpocherCounters counters_;
};

}  // namespace nxs::epoch
