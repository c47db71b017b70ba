#include "nxs/net/nxframe.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nxs/log.hpp"
#include "nxs/net/bytes.hpp"

namespace nxs::net {

namespace {
constexpr std::uint8_t kMagic[4] = {'N', 'X', 'S', '1'};
}

StreamId make_stream_id(std::string_view name) {
  StreamId id{};
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < id.size(); ++i) {
    for (char c : name) h = (h ^ static_cast<std::uint8_t>(c)) * 0x100000001b3ull;
    h = (h ^ i) * 0x100000001b3ull;
    id[i] = static_cast<std::uint8_t>(h >> 56);
  }
  return id;
}

std::vector<std::uint8_t> encode_frame(const NxFrame& frame) {
  ByteWriter w;
  w.bytes(kMagic);
  w.bytes(frame.stream_id);
  w.put<std::uint64_t>(frame.seq);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(frame.kind()));
  w.put<double>(frame.timestamp);
  if (const auto* sig = std::get_if<SignalBlock>(&frame.payload)) {
    if (sig->values.size() != static_cast<std::size_t>(sig->channels) * sig->samples) {
      throw Error(Errc::oversize, fmt::format("{} values for {} x {} block", sig->values.size(), sig->samples,
                                              sig->channels));
    }
    w.put<std::uint16_t>(sig->channels);
    w.put<std::uint16_t>(sig->samples);
    for (float v : sig->values) w.put<float>(v);
  } else {
    const auto& m = std::get<MarkerEvent>(frame.payload);
    if (m.label.size() > 0xFFFF) throw Error(Errc::oversize, fmt::format("label of {} bytes", m.label.size()));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(m.label.size()));
    w.text(m.label);
    w.put<std::int32_t>(m.code.value_or(kNoCode));
  }
  return w.take();
}

NxFrame decode_frame(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(Errc::bad_magic, fmt::format("frame magic {:02x}{:02x}{:02x}{:02x}", magic[0], magic[1], magic[2],
                                             magic[3]));
  }
  NxFrame f;
  const auto id = r.bytes(16);
  std::copy(id.begin(), id.end(), f.stream_id.begin());
  f.seq = r.get<std::uint64_t>();
  const auto kind = r.get<std::uint8_t>();
  f.timestamp = r.get<double>();
  if (kind == static_cast<std::uint8_t>(FrameKind::signal)) {
    SignalBlock b;
    b.channels = r.get<std::uint16_t>();
    b.samples = r.get<std::uint16_t>();
    const std::size_t n = static_cast<std::size_t>(b.channels) * b.samples;
    const auto raw = r.bytes(n * sizeof(float));
    b.values.resize(n);
    std::memcpy(b.values.data(), raw.data(), raw.size());
    f.payload = std::move(b);
  } else if (kind == static_cast<std::uint8_t>(FrameKind::marker)) {
    MarkerEvent m;
    m.timestamp = f.timestamp;
    m.label = r.text(r.get<std::uint16_t>());
    const auto code = r.get<std::int32_t>();
    if (code != kNoCode) m.code = code;
    f.payload = std::move(m);
  } else {
    throw Error(Errc::protocol_error, fmt::format("unknown frame kind {}", kind));
  }
  if (r.remaining() != 0) throw Error(Errc::protocol_error, fmt::format("{} trailing bytes", r.remaining()));
  return f;
}

std::vector<NxFrame> frames_for_chunk(const Chunk& chunk, const StreamId& id, std::uint64_t& seq,
                                      std::size_t max_frame_bytes) {
  const std::size_t ch = chunk.channels();
  if (ch > 0xFFFF) throw Error(Errc::oversize, fmt::format("{} channels exceed the u16 field", ch));
  const std::size_t overhead = kFrameHeaderSize + 4;
  const std::size_t row_bytes = 4 * std::max<std::size_t>(ch, 1);
  if (max_frame_bytes < overhead + row_bytes) {
    throw Error(Errc::oversize, fmt::format("one sample of {} channels does not fit a {}-byte frame", ch,
                                            max_frame_bytes));
  }
  const std::size_t per_frame = std::min<std::size_t>((max_frame_bytes - overhead) / row_bytes, 0xFFFF);
  std::vector<NxFrame> out;
  for (std::size_t start = 0; start < chunk.rows(); start += per_frame) {
    const std::size_t n = std::min(per_frame, chunk.rows() - start);
    NxFrame f;
    f.stream_id = id;
    f.seq = seq++;
    f.timestamp = chunk.timestamps[start];
    SignalBlock b;
    b.channels = static_cast<std::uint16_t>(ch);
    b.samples = static_cast<std::uint16_t>(n);
    b.values.reserve(n * ch);
    for (std::size_t r = start; r < start + n; ++r) {
      for (std::size_t c = 0; c < ch; ++c) {
        b.values.push_back(static_cast<float>(chunk.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
      }
    }
    f.payload = std::move(b);
    out.push_back(std::move(f));
  }
  return out;
}

NxFrame frame_for_marker(const MarkerEvent& marker, const StreamId& id, std::uint64_t& seq) {
  NxFrame f;
  f.stream_id = id;
  f.seq = seq++;
  f.timestamp = marker.timestamp;
  f.payload = marker;
  return f;
}

Chunk chunk_from_frame(const NxFrame& frame, double fs, const std::vector<std::string>& names) {
  const auto& b = std::get<SignalBlock>(frame.payload);
  Chunk c;
  c.sampling_rate = fs;
  c.channel_names = names.empty() ? default_channel_names(b.channels) : names;
  if (c.channel_names.size() != b.channels) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("frame has {} channels, receiver is configured for {}", b.channels, c.channel_names.size()));
  }
  c.data.resize(b.samples, b.channels);
  for (std::size_t i = 0; i < b.samples; ++i) {
    c.timestamps.push_back(frame.timestamp + static_cast<double>(i) / fs);
    for (std::size_t ch = 0; ch < b.channels; ++ch) {
      c.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ch)) = b.values[i * b.channels + ch];
    }
  }
  return c;
}

bool SeqTracker::accept(const StreamId& id, std::uint64_t seq) {
  auto it = next_.find(id);
  if (it == next_.end()) {
    next_.emplace(id, seq + 1);
    return true;
  }
  if (seq < it->second) return false;
  lost_ += seq - it->second;
  it->second = seq + 1;
  return true;
}

Transport parse_transport(std::string_view name) {
  if (name == "udp") return Transport::udp;
  if (name == "tcp") return Transport::tcp;
  throw Error(Errc::invalid_parameter, fmt::format("unknown transport '{}' (udp, tcp)", name));
}

NxSender::NxSender(Transport transport, const std::string& host, std::uint16_t port, std::string stream_name)
    : transport_(transport), id_(make_stream_id(stream_name)) {
  socket_ = transport == Transport::udp ? udp_connect(host, port)
                                        : tcp_connect(host, port, std::chrono::milliseconds(2000));
}

void NxSender::send_frame(const NxFrame& frame) {
  const auto bytes = encode_frame(frame);
  if (transport_ == Transport::udp) {
    if (udp_send(socket_, bytes)) {
      ++sent_;
    } else {
      ++failed_;
    }
    return;
  }
  ByteWriter w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(bytes.size()));
  w.bytes(bytes);
  socket_.write_all(w.data());
  ++sent_;
}

void NxSender::send(const Chunk& chunk) {
  const std::size_t limit = transport_ == Transport::udp ? kMaxUdpFrame : kFrameHeaderSize + 4 + 4 * 65535 * std::max<std::size_t>(chunk.channels(), 1);
  for (const auto& f : frames_for_chunk(chunk, id_, seq_, limit)) send_frame(f);
}

void NxSender::send(const MarkerEvent& marker) { send_frame(frame_for_marker(marker, id_, seq_)); }

NxReceiver::NxReceiver(Transport transport, std::uint16_t port, std::size_t queue_capacity, bool any)
    : transport_(transport), queue_(queue_capacity) {
  socket_ = transport == Transport::udp ? udp_bind(port, any) : tcp_listen(port, any);
  port_ = socket_.local_port();
  thread_ = std::thread([this] { transport_ == Transport::udp ? run_udp() : run_tcp(); });
}

NxReceiver::~NxReceiver() { stop(); }

void NxReceiver::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

void NxReceiver::handle(std::span<const std::uint8_t> bytes) {
  try {
    NxFrame f = decode_frame(bytes);
    received_.fetch_add(1);
    const std::uint64_t before = tracker_.lost();
    if (!tracker_.accept(f.stream_id, f.seq)) return;
    lost_.fetch_add(tracker_.lost() - before);
    queue_.push(std::move(f));
  } catch (const Error& e) {
    bad_.fetch_add(1);
    logger().warn("nxframe: dropped undecodable frame: {}", e.what());
  }
}

void NxReceiver::run_udp() {
  std::vector<std::uint8_t> buf;
  while (!stop_) {
    try {
      if (udp_recv(socket_, buf, std::chrono::milliseconds(100))) handle(buf);
    } catch (const Error& e) {
      logger().error("nxframe: udp receive failed: {}", e.what());
      return;
    }
  }
}

void NxReceiver::run_tcp() {
  while (!stop_) {
    Socket conn;
    try {
      conn = tcp_accept(socket_, std::chrono::milliseconds(100));
    } catch (const Error& e) {
      logger().error("nxframe: accept failed: {}", e.what());
      return;
    }
    if (!conn.valid()) continue;
    std::vector<std::uint8_t> frame;
    while (!stop_) {
      std::uint8_t len_bytes[4];
      if (conn.read_exact(len_bytes, stop_) != 4) break;
      std::uint32_t len = 0;
      std::memcpy(&len, len_bytes, 4);
      if (len > (64u << 20)) {
        logger().warn("nxframe: {}-byte frame exceeds the limit; closing connection", len);
        break;
      }
      frame.resize(len);
      if (conn.read_exact(frame, stop_) != len) break;
      handle(frame);
    }
  }
}

}  // namespace nxs::net
