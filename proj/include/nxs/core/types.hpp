#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nxs {

/// Row-major samples x channels table. Internal arithmetic is double.
using SampleTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sentinel sampling rate for streams without a regular sample clock.
inline constexpr double kIrregularRate = 0.0;

/// A timestamped block of multichannel samples.
struct Chunk {
  std::vector<double> timestamps;
  std::vector<std::string> channel_names;
  SampleTable data;
  double sampling_rate = kIrregularRate;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(data.rows()); }
  std::size_t channels() const noexcept { return channel_names.size(); }
  bool empty() const noexcept { return timestamps.empty(); }
  bool regular() const noexcept { return sampling_rate > 0.0; }

  bool operator==(const Chunk& other) const;
};

/// Throws Errc::invalid_chunk if any structural invariant is violated.
void check_chunk(const Chunk& chunk);

/// Row-wise concatenation. All parts must share channel names.
Chunk concat(const std::vector<Chunk>& parts);

/// Rows [begin, begin + count) of `chunk`.
Chunk slice_rows(const Chunk& chunk, std::size_t begin, std::size_t count);

struct MarkerEvent {
  double timestamp = 0.0;
  std::string label;
  std::optional<std::int32_t> code;

  bool operator==(const MarkerEvent&) const = default;
};

struct Epoch {
  double onset = 0.0;
  std::optional<MarkerEvent> trigger;
  std::vector<double> timestamps;
  SampleTable data;
  std::vector<std::string> channel_names;
  double sampling_rate = kIrregularRate;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(data.rows()); }
  std::size_t channels() const noexcept { return channel_names.size(); }
};

enum class SpectrumScaling { density, magnitude };

struct SpectrumFrame {
  double timestamp = 0.0;
  std::vector<double> frequencies;
  std::vector<std::string> channel_names;
  SampleTable values;  // channels x bins
  SpectrumScaling scaling = SpectrumScaling::density;
};

struct FeatureVector {
  double timestamp = 0.0;
  std::vector<double> values;
  std::vector<std::string> names;  // one per value, e.g. "mean:C3"; may be empty
  std::optional<std::string> label;

  bool operator==(const FeatureVector&) const = default;
};

enum class PortType { signal, epoch, marker, spectrum, vector };

std::string_view to_string(PortType type) noexcept;

/// "Ch1".."ChN".
std::vector<std::string> default_channel_names(std::size_t count, std::string_view prefix = "Ch");

}  // namespace nxs
