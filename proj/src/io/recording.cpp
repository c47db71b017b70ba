#include "nxs/io/recording.hpp"

namespace nxs::io {

std::vector<const RecordedStream*> Recording::signal_streams() const {
  std::vector<const RecordedStream*> out;
  for (const auto& s : streams) {
    if (s.kind == StreamKind::signal) out.push_back(&s);
  }
  return out;
}

std::vector<const RecordedStream*> Recording::marker_streams() const {
  std::vector<const RecordedStream*> out;
  for (const auto& s : streams) {
    if (s.kind == StreamKind::marker) out.push_back(&s);
  }
  return out;
}

}  // namespace nxs::io
