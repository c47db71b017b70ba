#pragma once

#include <string>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::io {

enum class StreamKind { signal, marker };

struct RecordedStream {
  std::string name;
  StreamKind kind = StreamKind::signal;
  std::vector<std::string> channel_names;
  double fs = kIrregularRate;
  std::vector<double> timestamps;  // one per row (signal) or per marker
  SampleTable samples;             // signal streams
  std::vector<MarkerEvent> markers;  // marker streams

  std::size_t size() const noexcept { return timestamps.size(); }
};

struct Recording {
  std::string format;  // "xdf" or "brainvision"
  std::vector<RecordedStream> streams;

  std::vector<const RecordedStream*> signal_streams() const;
  std::vector<const RecordedStream*> marker_streams() const;
};

}  // namespace nxs::io
