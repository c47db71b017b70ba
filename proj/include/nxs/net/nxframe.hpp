#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "nxs/core/types.hpp"
#include "nxs/net/queue.hpp"
#include "nxs/net/socket.hpp"

namespace nxs::net {

// NxFrame wire format, little-endian:
//
//   offset size field
//   0      4    magic "NXS1"
//   4      16   stream id
//   20     8    seq (u64)
//   28     1    kind (1 signal, 2 marker)
//   29     8    timestamp (f64 seconds, first sample of the block)
//   37     ...  payload
//
//   signal payload: u16 channels, u16 samples, f32 values row-major
//   marker payload: u16 label length, UTF-8 label, i32 code (INT32_MIN = none)
//
// Over TCP every frame is preceded by its u32 byte length.

using StreamId = std::array<std::uint8_t, 16>;

/// Stream id derived from a name (FNV-1a spread over 16 bytes).
StreamId make_stream_id(std::string_view name);

inline constexpr std::size_t kFrameHeaderSize = 37;
inline constexpr std::size_t kMaxUdpFrame = 1400;
inline constexpr std::int32_t kNoCode = INT32_MIN;

enum class FrameKind : std::uint8_t { signal = 1, marker = 2 };

struct SignalBlock {
  std::uint16_t channels = 0;
  std::uint16_t samples = 0;
  std::vector<float> values;  // samples x channels, row-major

  bool operator==(const SignalBlock&) const = default;
};

struct NxFrame {
  StreamId stream_id{};
  std::uint64_t seq = 0;
  double timestamp = 0.0;
  std::variant<SignalBlock, MarkerEvent> payload;

  FrameKind kind() const noexcept { return payload.index() == 0 ? FrameKind::signal : FrameKind::marker; }
  bool operator==(const NxFrame&) const = default;
};

/// Throws Errc::oversize when a count does not fit its u16 field or the
/// values do not match the declared shape.
std::vector<std::uint8_t> encode_frame(const NxFrame& frame);
/// Throws Errc::bad_magic, Errc::truncated, or Errc::protocol_error for an
/// unknown kind or trailing bytes.
NxFrame decode_frame(std::span<const std::uint8_t> bytes);

/// Splits a chunk into signal frames of at most `max_frame_bytes` each,
/// numbering them from `seq` (advanced past the last frame). Samples are
/// narrowed to f32. Throws Errc::oversize if one sample row cannot fit.
std::vector<NxFrame> frames_for_chunk(const Chunk& chunk, const StreamId& id, std::uint64_t& seq,
                                      std::size_t max_frame_bytes);
NxFrame frame_for_marker(const MarkerEvent& marker, const StreamId& id, std::uint64_t& seq);

/// Rebuilds a chunk from a signal frame: timestamps are frame.timestamp +
/// i / fs; channel names come from the receiver's configuration (or
/// Ch1..ChN when `names` is empty).
Chunk chunk_from_frame(const NxFrame& frame, double fs, const std::vector<std::string>& names);

/// Per-stream sequence tracking; a jump of k > 1 counts k - 1 lost frames.
class SeqTracker {
 public:
  /// False for a duplicate or reordered (stale) frame.
  bool accept(const StreamId& id, std::uint64_t seq);
  std::uint64_t lost() const noexcept { return lost_; }

 private:
  std::map<StreamId, std::uint64_t> next_;
  std::uint64_t lost_ = 0;
};

enum class Transport { udp, tcp };

Transport parse_transport(std::string_view name);

/// Synchronous sender. UDP is best-effort and never blocks; TCP connects on
/// construction and writes length-prefixed frames.
class NxSender {
 public:
  NxSender(Transport transport, const std::string& host, std::uint16_t port, std::string stream_name);

  void send(const Chunk& chunk);
  void send(const MarkerEvent& marker);

  std::uint64_t frames_sent() const noexcept { return sent_; }
  std::uint64_t frames_failed() const noexcept { return failed_; }

 private:
  void send_frame(const NxFrame& frame);

  Transport transport_;
  Socket socket_;
  StreamId id_;
  std::uint64_t seq_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t failed_ = 0;
};

/// Background receiver: a reader thread decodes frames into a bounded
/// queue. Over TCP it accepts one connection at a time.
class NxReceiver {
 public:
  NxReceiver(Transport transport, std::uint16_t port, std::size_t queue_capacity = 256, bool any = false);
  ~NxReceiver();
  NxReceiver(const NxReceiver&) = delete;
  NxReceiver& operator=(const NxReceiver&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  std::vector<NxFrame> drain() { return queue_.drain(); }
  void stop();

  std::uint64_t frames_received() const noexcept { return received_.load(); }
  /// Frames lost on the wire (seq gaps) plus frames dropped by the queue.
  std::uint64_t frames_dropped() const noexcept { return lost_.load() + queue_.dropped(); }
  std::uint64_t decode_errors() const noexcept { return bad_.load(); }

 private:
  void run_udp();
  void run_tcp();
  void handle(std::span<const std::uint8_t> bytes);

  Transport transport_;
  Socket socket_;
  std::uint16_t port_ = 0;
  BoundedQueue<NxFrame> queue_;
  SeqTracker tracker_;  // reader thread only
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> received_{0};
  std::atomic<std::uint64_t> lost_{0};
  std::atomic<std::uint64_t> bad_{0};
  std::thread thread_;
};

}  // namespace nxs::net
