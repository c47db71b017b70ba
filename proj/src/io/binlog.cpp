#include "nxs/io/binlog.hpp"

#include <fmt/format.h>

#include "nxs/error.hpp"
#include "nxs/net/bytes.hpp"

namespace nxs::io {

BinLogWriter::BinLogWriter(std::filesystem::path path) : path_(std::move(path)) {}

BinLogWriter::~BinLogWriter() {
  if (out_.is_open()) out_.flush();
}

void BinLogWriter::append(const Chunk& chunk) {
  net::ByteWriter w;
  if (!header_) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(Errc::io_error, "cannot write " + path_.string());
    names_ = chunk.channel_names;
    w.text("NXL1");
    w.put<std::uint32_t>(static_cast<std::uint32_t>(names_.size()));
    w.put<double>(chunk.sampling_rate);
    w.put<double>(chunk.empty() ? 0.0 : chunk.timestamps.front());
    for (const auto& n : names_) {
      if (n.size() > 0xFFFF) throw Error(Errc::oversize, "channel name longer than 65535 bytes");
      w.put<std::uint16_t>(static_cast<std::uint16_t>(n.size()));
      w.text(n);
    }
    header_ = true;
    last_flush_ = std::chrono::steady_clock::now();
  } else if (chunk.channel_names != names_) {
    throw Error(Errc::schema_changed, fmt::format("{}: channel set changed", path_.filename().string()));
  }
  for (std::size_t r = 0; r < chunk.rows(); ++r) {
    w.put<double>(chunk.timestamps[r]);
    for (Eigen::Index c = 0; c < chunk.data.cols(); ++c) {
      w.put<float>(static_cast<float>(chunk.data(static_cast<Eigen::Index>(r), c)));
    }
  }
  out_.write(reinterpret_cast<const char*>(w.data().data()), static_cast<std::streamsize>(w.size()));
  if (!out_) throw Error(Errc::io_error, "write failed on " + path_.string());
  records_ += chunk.rows();
  if (std::chrono::steady_clock::now() - last_flush_ >= std::chrono::seconds(1)) flush();
}

void BinLogWriter::flush() {
  if (!out_.is_open()) return;
  out_.flush();
  last_flush_ = std::chrono::steady_clock::now();
}

BinLog read_binlog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  net::ByteReader r(bytes);
  if (bytes.size() < 4 || r.text(4) != "NXL1") throw Error(Errc::bad_magic, path.filename().string() + " is not an NXL1 log");
  BinLog log;
  const auto nch = r.get<std::uint32_t>();
  log.fs = r.get<double>();
  log.start = r.get<double>();
  for (std::uint32_t i = 0; i < nch; ++i) log.channel_names.push_back(r.text(r.get<std::uint16_t>()));
  const std::size_t record = 8 + 4 * static_cast<std::size_t>(nch);
  if (r.remaining() % record != 0) {
    throw Error(Errc::truncated, fmt::format("{} trailing bytes after the last whole record", r.remaining() % record));
  }
  const std::size_t n = r.remaining() / record;
  log.samples.resize(static_cast<Eigen::Index>(n), nch);
  for (std::size_t i = 0; i < n; ++i) {
    log.timestamps.push_back(r.get<double>());
    for (std::uint32_t c = 0; c < nch; ++c) log.samples(static_cast<Eigen::Index>(i), c) = r.get<float>();
  }
  return log;
}

}  // namespace nxs::io
