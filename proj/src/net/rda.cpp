#include "nxs/net/rda.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include <fmt/format.h>

#include "nxs/error.hpp"
#include "nxs/log.hpp"
#include "nxs/net/bytes.hpp"
#include "nxs/net/socket.hpp"

namespace nxs::net {

namespace {

RdaStart decode_start(ByteReader& r) {
  RdaStart s;
  s.channel_count = r.get<std::uint32_t>();
  s.sampling_interval_us = r.get<double>();
  if (!(s.sampling_interval_us > 0.0)) {
    throw Error(Errc::inconsistent_header, fmt::format("sampling interval {} us", s.sampling_interval_us));
  }
  if (s.channel_count == 0 || s.channel_count > 65535) {
    throw Error(Errc::inconsistent_header, fmt::format("{} channels", s.channel_count));
  }
  for (std::uint32_t i = 0; i < s.channel_count; ++i) s.resolutions.push_back(r.get<double>());
  for (std::uint32_t i = 0; i < s.channel_count; ++i) s.channel_names.push_back(r.cstring());
  return s;
}

RdaData decode_data(ByteReader& r, std::uint32_t channels) {
  RdaData d;
  d.block = r.get<std::uint32_t>();
  d.points = r.get<std::uint32_t>();
  const auto nmarkers = r.get<std::uint32_t>();
  const std::size_t n = static_cast<std::size_t>(d.points) * channels;
  const auto raw = r.bytes(n * sizeof(float));
  d.samples.resize(n);
  std::memcpy(d.samples.data(), raw.data(), raw.size());
  for (std::uint32_t i = 0; i < nmarkers; ++i) {
    const std::size_t begin = r.position();
    const auto size = r.get<std::uint32_t>();
    if (size < 16) throw Error(Errc::inconsistent_header, fmt::format("marker size {}", size));
    RdaMarker m;
    m.position = r.get<std::uint32_t>();
    m.points = r.get<std::uint32_t>();
    m.channel = r.get<std::int32_t>();
    const auto strings = r.bytes(size - 16);
    ByteReader s(strings);
    m.type = s.cstring();
    m.description = s.remaining() > 0 ? s.cstring() : std::string();
    r.seek(begin + size);
    d.markers.push_back(std::move(m));
  }
  return d;
}

void put_header(ByteWriter& w, std::uint32_t type) {
  w.bytes(kRdaGuid);
  w.put<std::uint32_t>(0);  // patched with the total size
  w.put<std::uint32_t>(type);
}

std::vector<std::uint8_t> finish(ByteWriter& w) {
  w.patch<std::uint32_t>(16, static_cast<std::uint32_t>(w.size()));
  return w.take();
}

}  // namespace

RdaMessage rda_decode(std::span<const std::uint8_t> bytes, std::optional<std::uint32_t> channels) {
  ByteReader r(bytes);
  const auto guid = r.bytes(16);
  if (!std::equal(guid.begin(), guid.end(), kRdaGuid.begin())) throw Error(Errc::bad_guid, "message GUID mismatch");
  const auto size = r.get<std::uint32_t>();
  const auto type = r.get<std::uint32_t>();
  if (size < kRdaHeaderSize) throw Error(Errc::inconsistent_header, fmt::format("declared size {} < 24", size));
  if (bytes.size() < size) throw Error(Errc::truncated, fmt::format("expected {} bytes, got {}", size, bytes.size()));
  ByteReader body(bytes.subspan(kRdaHeaderSize, size - kRdaHeaderSize));
  RdaMessage out;
  switch (type) {
    case kRdaStart: out = decode_start(body); break;
    case kRdaStop: return RdaStop{};
    case kRdaData32:
      if (!channels) throw Error(Errc::inconsistent_header, "data message before start message");
      out = decode_data(body, *channels);
      break;
    default: return RdaUnknown{type};
  }
  if (body.remaining() != 0) {
    throw Error(Errc::inconsistent_header,
                fmt::format("declared size {} leaves {} unread bytes", size, body.remaining()));
  }
  return out;
}

std::vector<std::uint8_t> rda_encode(const RdaStart& m) {
  ByteWriter w;
  put_header(w, kRdaStart);
  w.put<std::uint32_t>(m.channel_count);
  w.put<double>(m.sampling_interval_us);
  for (double r : m.resolutions) w.put<double>(r);
  for (const auto& n : m.channel_names) w.cstring(n);
  return finish(w);
}

std::vector<std::uint8_t> rda_encode(const RdaData& m) {
  ByteWriter w;
  put_header(w, kRdaData32);
  w.put<std::uint32_t>(m.block);
  w.put<std::uint32_t>(m.points);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.markers.size()));
  for (float v : m.samples) w.put<float>(v);
  for (const auto& mk : m.markers) {
    const std::size_t begin = w.size();
    w.put<std::uint32_t>(0);
    w.put<std::uint32_t>(mk.position);
    w.put<std::uint32_t>(mk.points);
    w.put<std::int32_t>(mk.channel);
    w.cstring(mk.type);
    w.cstring(mk.description);
    w.patch<std::uint32_t>(begin, static_cast<std::uint32_t>(w.size() - begin));
  }
  return finish(w);
}

std::vector<std::uint8_t> rda_encode_stop() {
  ByteWriter w;
  put_header(w, kRdaStop);
  return finish(w);
}

std::vector<std::uint8_t> rda_encode_raw(std::uint32_t type, std::span<const std::uint8_t> body) {
  ByteWriter w;
  put_header(w, type);
  w.bytes(body);
  return finish(w);
}

void RdaStream::start(const RdaStart& s) {
  start_ = s;
  samples_ = 0;
}

std::pair<Chunk, std::vector<MarkerEvent>> RdaStream::convert(const RdaData& d) {
  if (!start_) throw Error(Errc::protocol_error, "data block before start message");
  const std::size_t ch = start_->channel_count;
  if (d.samples.size() != static_cast<std::size_t>(d.points) * ch) {
    throw Error(Errc::protocol_error, fmt::format("block {} carries {} values for {} x {}", d.block, d.samples.size(),
                                                  d.points, ch));
  }
  const double fs = start_->sampling_rate();
  Chunk c;
  c.sampling_rate = fs;
  c.channel_names = start_->channel_names;
  c.data.resize(d.points, static_cast<Eigen::Index>(ch));
  for (std::uint32_t i = 0; i < d.points; ++i) {
    c.timestamps.push_back(origin_ + static_cast<double>(samples_ + i) / fs - offset_);
    for (std::size_t k = 0; k < ch; ++k) {
      c.data(i, static_cast<Eigen::Index>(k)) = static_cast<double>(d.samples[i * ch + k]) * start_->resolutions[k];
    }
  }
  std::vector<MarkerEvent> markers;
  for (const auto& m : d.markers) {
    MarkerEvent e;
    e.timestamp = origin_ + static_cast<double>(samples_ + m.position) / fs - offset_;
    e.label = m.description.empty() ? m.type : m.description;
    try {
      std::size_t used = 0;
      const int code = std::stoi(e.label, &used);
      if (used == e.label.size()) e.code = code;
    } catch (const std::exception&) {
    }
    markers.push_back(std::move(e));
  }
  samples_ += d.points;
  return {std::move(c), std::move(markers)};
}

RdaClient::RdaClient(RdaClientOptions options)
    : options_(std::move(options)), queue_(options_.queue_capacity) {
  thread_ = std::thread([this] { run(); });
}

RdaClient::~RdaClient() { stop(); }

void RdaClient::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

bool RdaClient::sleep_for(double seconds) {
  const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
  while (std::chrono::steady_clock::now() < until) {
    if (stop_) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return !stop_;
}

bool RdaClient::session() {
  Socket s = tcp_connect(options_.host, options_.port, std::chrono::milliseconds(2000));
  std::optional<std::uint32_t> channels;
  std::vector<std::uint8_t> msg;
  while (!stop_) {
    msg.resize(kRdaHeaderSize);
    const std::size_t got = s.read_exact(msg, stop_);
    if (got == 0 && !stop_) throw Error(Errc::connect_failed, "server closed the connection");
    if (got != kRdaHeaderSize) {
      if (stop_) return false;
      throw Error(Errc::connect_failed, "connection lost inside a message header");
    }
    if (!std::equal(msg.begin(), msg.begin() + 16, kRdaGuid.begin())) throw Error(Errc::bad_guid, "message GUID mismatch");
    std::uint32_t size = 0;
    std::memcpy(&size, msg.data() + 16, 4);
    if (size < kRdaHeaderSize || size > (256u << 20)) {
      throw Error(Errc::inconsistent_header, fmt::format("declared size {}", size));
    }
    msg.resize(size);
    const std::span<std::uint8_t> rest(msg.data() + kRdaHeaderSize, size - kRdaHeaderSize);
    if (s.read_exact(rest, stop_) != rest.size()) {
      if (stop_) return false;
      throw Error(Errc::connect_failed, "connection lost inside a message body");
    }
    RdaMessage m = rda_decode(msg, channels);
    if (auto* start = std::get_if<RdaStart>(&m)) {
      channels = start->channel_count;
      queue_.push(std::move(*start));
    } else if (auto* data = std::get_if<RdaData>(&m)) {
      queue_.push(std::move(*data));
    } else if (std::holds_alternative<RdaStop>(m)) {
      return true;
    } else {
      unknown_.fetch_add(1);
    }
  }
  return false;
}

void RdaClient::run() {
  int failures = 0;
  double backoff = options_.initial_backoff;
  while (!stop_) {
    try {
      if (session()) {
        queue_.push(RdaEnded{"stop message", false});
        return;
      }
      return;  // stop requested
    } catch (const Error& e) {
      if (e.code() != Errc::connect_failed && e.code() != Errc::io_error) {
        queue_.push(RdaEnded{e.what(), true});
        return;
      }
      if (++failures > options_.max_retries) {
        logger().warn("rda: giving up after {} attempts: {}", failures, e.detail());
        queue_.push(RdaEnded{e.what(), false});
        return;
      }
      logger().info("rda: {} (retry {} in {:.2f} s)", e.detail(), failures, backoff);
      reconnects_.fetch_add(1);
      if (!sleep_for(backoff)) return;
      backoff = std::min(backoff * 2.0, 2.0);
    }
  }
}

}  // namespace nxs::net
