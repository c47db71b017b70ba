#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "nxs/core/types.hpp"
#include "nxs/net/queue.hpp"

namespace nxs::net {

// Brain Products Remote Data Access, 32-bit float variant. Every message is
// a 24-byte header (GUID, u32 total size, u32 type) followed by a body.

inline constexpr std::array<std::uint8_t, 16> kRdaGuid = {0x8E, 0x45, 0x58, 0x43, 0x96, 0xC9, 0x98, 0x43,
                                                          0xB9, 0xD2, 0xD7, 0xD5, 0xE7, 0x6C, 0xD2, 0xF3};
inline constexpr std::size_t kRdaHeaderSize = 24;
inline constexpr std::uint16_t kRdaDefaultPort = 51244;

enum : std::uint32_t { kRdaStart = 1, kRdaData16 = 2, kRdaStop = 3, kRdaData32 = 4 };

struct RdaStart {
  std::uint32_t channel_count = 0;
  double sampling_interval_us = 0.0;
  std::vector<double> resolutions;
  std::vector<std::string> channel_names;

  double sampling_rate() const { return 1e6 / sampling_interval_us; }
  bool operator==(const RdaStart&) const = default;
};

struct RdaMarker {
  std::uint32_t position = 0;  // sample index within the block
  std::uint32_t points = 1;
  std::int32_t channel = -1;   // -1: all channels
  std::string type;
  std::string description;

  bool operator==(const RdaMarker&) const = default;
};

struct RdaData {
  std::uint32_t block = 0;
  std::uint32_t points = 0;
  std::vector<float> samples;  // points x channels, row-major
  std::vector<RdaMarker> markers;

  bool operator==(const RdaData&) const = default;
};

struct RdaStop {
  bool operator==(const RdaStop&) const = default;
};

/// A message type this client does not decode (e.g. the 16-bit data variant).
struct RdaUnknown {
  std::uint32_t type = 0;
  bool operator==(const RdaUnknown&) const = default;
};

using RdaMessage = std::variant<RdaStart, RdaData, RdaStop, RdaUnknown>;

/// Decodes one complete message. `channels` is the count announced by the
/// preceding Start (needed to size Data bodies). Throws Errc::bad_guid,
/// Errc::truncated, or Errc::inconsistent_header.
RdaMessage rda_decode(std::span<const std::uint8_t> bytes, std::optional<std::uint32_t> channels = std::nullopt);

std::vector<std::uint8_t> rda_encode(const RdaStart& m);
std::vector<std::uint8_t> rda_encode(const RdaData& m);
std::vector<std::uint8_t> rda_encode_stop();
std::vector<std::uint8_t> rda_encode_raw(std::uint32_t type, std::span<const std::uint8_t> body);

/// Turns decoded Data blocks into chunks and markers. Timestamps are
/// origin + n / fs - offset where n counts samples since Start; the
/// integer count keeps block boundaries gap-free.
class RdaStream {
 public:
  RdaStream(double origin, double offset) : origin_(origin), offset_(offset) {}

  void start(const RdaStart& s);
  bool started() const noexcept { return start_.has_value(); }
  const RdaStart& info() const { return *start_; }

  /// Samples are scaled by the per-channel resolution. Throws
  /// Errc::protocol_error if no Start has been seen or the shape is wrong.
  std::pair<Chunk, std::vector<MarkerEvent>> convert(const RdaData& d);

  std::uint64_t samples_seen() const noexcept { return samples_; }
  void set_origin(double origin) noexcept { origin_ = origin; }

 private:
  std::optional<RdaStart> start_;
  double origin_;
  double offset_;
  std::uint64_t samples_ = 0;
};

struct RdaClientOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = kRdaDefaultPort;
  int max_retries = 5;
  double initial_backoff = 0.1;  // seconds, doubled per retry up to 2 s
  std::size_t queue_capacity = 256;
};

/// What the reader thread hands to the node.
struct RdaEnded {
  std::string reason;
  bool error = false;  // true for a protocol error
};
using RdaEvent = std::variant<RdaStart, RdaData, RdaEnded>;

/// Background TCP reader. Connects (retrying with exponential backoff),
/// decodes messages and queues them. A Stop message, exhausted retries or
/// a protocol error end the stream with an RdaEnded event.
class RdaClient {
 public:
  explicit RdaClient(RdaClientOptions options);
  ~RdaClient();
  RdaClient(const RdaClient&) = delete;
  RdaClient& operator=(const RdaClient&) = delete;

  std::vector<RdaEvent> drain() { return queue_.drain(); }
  void stop();

  std::uint64_t unknown_messages() const noexcept { return unknown_.load(); }
  std::uint64_t dropped() const noexcept { return queue_.dropped(); }
  std::uint64_t reconnects() const noexcept { return reconnects_.load(); }

 private:
  void run();
  /// One connection; returns true if the session ended with Stop.
  bool session();
  bool sleep_for(double seconds);

  RdaClientOptions options_;
  BoundedQueue<RdaEvent> queue_;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> unknown_{0};
  std::atomic<std::uint64_t> reconnects_{0};
  std::thread thread_;
};

}  // namespace nxs::net
