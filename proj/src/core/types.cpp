#include "nxs/core/types.hpp"

#include <unordered_set>

#include "nxs/error.hpp"

namespace nxs {

bool Chunk::operator==(const Chunk& other) const {
  return timestamps == other.timestamps && channel_names == other.channel_names &&
         sampling_rate == other.sampling_rate && data.rows() == other.data.rows() &&
         data.cols() == other.data.cols() && data == other.data;
}

void check_chunk(const Chunk& chunk) {
  if (static_cast<std::size_t>(chunk.data.rows()) != chunk.timestamps.size()) {
    throw Error(Errc::invalid_chunk, "row count " + std::to_string(chunk.data.rows()) +
                                         " != timestamp count " +
                                         std::to_string(chunk.timestamps.size()));
  }
  if (static_cast<std::size_t>(chunk.data.cols()) != chunk.channel_names.size()) {
    throw Error(Errc::invalid_chunk, "column count " + std::to_string(chunk.data.cols()) +
                                         " != channel count " +
                                         std::to_string(chunk.channel_names.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : chunk.channel_names) {
    if (!seen.insert(name).second) throw Error(Errc::invalid_chunk, "duplicate channel " + name);
  }
  if (chunk.sampling_rate < 0.0) throw Error(Errc::invalid_chunk, "negative sampling rate");
  for (std::size_t i = 1; i < chunk.timestamps.size(); ++i) {
    const bool ok = chunk.regular() ? chunk.timestamps[i] > chunk.timestamps[i - 1]
                                    : chunk.timestamps[i] >= chunk.timestamps[i - 1];
    if (!ok) throw Error(Errc::invalid_chunk, "timestamps not increasing at row " + std::to_string(i));
  }
}

Chunk concat(const std::vector<Chunk>& parts) {
  Chunk out;
  if (parts.empty()) return out;
  out.channel_names = parts.front().channel_names;
  out.sampling_rate = parts.front().sampling_rate;
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.channel_names != out.channel_names) {
      throw Error(Errc::invalid_chunk, "concat: channel sets differ");
    }
    total += p.data.rows();
  }
  out.data.resize(total, static_cast<Eigen::Index>(out.channel_names.size()));
  out.timestamps.reserve(static_cast<std::size_t>(total));
  Eigen::Index row = 0;
  for (const auto& p : parts) {
    if (p.data.rows() > 0) out.data.middleRows(row, p.data.rows()) = p.data;
    row += p.data.rows();
    out.timestamps.insert(out.timestamps.end(), p.timestamps.begin(), p.timestamps.end());
  }
  return out;
}

Chunk slice_rows(const Chunk& chunk, std::size_t begin, std::size_t count) {
  Chunk out;
  out.channel_names = chunk.channel_names;
  out.sampling_rate = chunk.sampling_rate;
  out.data = chunk.data.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  out.timestamps.assign(chunk.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                        chunk.timestamps.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return out;
}

std::string_view to_string(PortType type) noexcept {
  switch (type) {
    case PortType::signal: return "signal";
    case PortType::epoch: return "epoch";
    case PortType::marker: return "marker";
    case PortType::spectrum: return "spectrum";
    case PortType::vector: return "vector";
  }
  return "?";
}

std::vector<std::string> default_channel_names(std::size_t count, std::string_view prefix) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back(std::string(prefix) + std::to_string(i + 1));
  return names;
}

}  // namespace nxs
