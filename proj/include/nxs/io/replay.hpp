#pragma once

#include <cstddef>
#include <vector>

#include "nxs/io/recording.hpp"

namespace nxs::io {

struct ReplayBatch {
  std::vector<std::vector<Chunk>> signals;  // per signal stream, pieces of <= 32 ms
  std::vector<MarkerEvent> markers;         // all marker streams, time ordered
};

/// Paces a recording against the pipeline clock. Timestamps are rebased so
/// the earliest item of the recording is at 0 and divided by `rate`;
/// output sampling rates are multiplied by `rate` to stay consistent with
/// the stamps. A sample is due once its whole period has elapsed, i.e.
/// when (t - t_first + 1/fs) / rate <= clock; a marker when
/// (t - t_first) / rate <= clock.
class Replayer {
 public:
  Replayer(const Recording& recording, double rate = 1.0);

  ReplayBatch emit_due(double clock);
  bool done() const noexcept;
  /// Clock value at which the last item becomes due.
  double end_time() const noexcept { return end_time_; }
  std::size_t signal_count() const noexcept { return signals_.size(); }

 private:
  struct Cursor {
    const RecordedStream* stream;
    std::size_t next = 0;
    std::size_t piece = 1;  // samples per emitted piece
  };

  double rate_;
  double t_first_ = 0.0;
  double end_time_ = 0.0;
  std::vector<Cursor> signals_;
  std::vector<MarkerEvent> markers_;  // rebased, sorted
  std::size_t next_marker_ = 0;
};

}  // namespace nxs::io
