#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::io {

// NXL1 log, little-endian:
//   "NXL1", u32 channel count, f64 fs, f64 start time,
//   per channel: u16 name length + UTF-8 name,
//   then records of f64 timestamp + f32 value per channel.

/// Chunked binary log writer. The header is written with the first chunk;
/// the stream is flushed at least once per second of wall time.
class BinLogWriter {
 public:
  explicit BinLogWriter(std::filesystem::path path);
  ~BinLogWriter();

  void append(const Chunk& chunk);
  void flush();

  std::size_t records() const noexcept { return records_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<std::string> names_;
  bool header_ = false;
  std::size_t records_ = 0;
  std::chrono::steady_clock::time_point last_flush_;
};

struct BinLog {
  std::vector<std::string> channel_names;
  double fs = 0.0;
  double start = 0.0;
  std::vector<double> timestamps;
  SampleTable samples;  // f32 values widened to double
};

/// Throws Errc::bad_magic, Errc::truncated or Errc::io_error.
BinLog read_binlog(const std::filesystem::path& path);

}  // namespace nxs::io
