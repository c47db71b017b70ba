#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::net {

/// Little-endian encoder. The engine only targets little-endian hosts; the
/// static_assert below keeps the memcpy-based codec honest.
static_assert(std::endian::native == std::endian::little, "wire codecs assume a little-endian host");

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void text(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void cstring(std::string_view s) {
    text(s);
    buf_.push_back(0);
  }
  /// Overwrites a previously written value at `offset`.
  template <class T>
  void patch(std::size_t offset, T v) {
    std::memcpy(buf_.data() + offset, &v, sizeof(T));
  }

  std::size_t size() const noexcept { return buf_.size(); }
  std::vector<std::uint8_t>& data() noexcept { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked little-endian decoder; running past the end throws
/// Errc::truncated with the expected and available sizes.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  template <class T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::string text(std::size_t n) {
    auto s = bytes(n);
    return {s.begin(), s.end()};
  }
  /// Zero-terminated string; the terminator must be inside the buffer.
  std::string cstring() {
    std::size_t end = pos_;
    while (end < data_.size() && data_[end] != 0) ++end;
    if (end == data_.size()) {
      throw Error(Errc::truncated, fmt::format("unterminated string at offset {}", pos_));
    }
    std::string s(data_.begin() + static_cast<std::ptrdiff_t>(pos_), data_.begin() + static_cast<std::ptrdiff_t>(end));
    pos_ = end + 1;
    return s;
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  void seek(std::size_t pos) {
    if (pos > data_.size()) throw Error(Errc::truncated, fmt::format("expected {} bytes, got {}", pos, data_.size()));
    pos_ = pos;
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(Errc::truncated, fmt::format("expected {} bytes, got {}", pos_ + n, data_.size()));
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace nxs::net
