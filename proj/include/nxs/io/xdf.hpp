#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "nxs/io/recording.hpp"

namespace nxs::io {

/// Parses an XDF container: "XDF:" magic, then chunks of
/// [length-byte-count u8][length][tag u16][content]. Supports float32,
/// double64 and string channel formats; string streams become marker
/// streams whose code is the label when it is an integer literal. Samples
/// without a stamp get the previous stamp + 1/nominal_srate. ClockOffset
/// chunks are applied by piecewise-linear interpolation over collection
/// time (constant beyond the first/last record).
///
/// Throws Errc::bad_magic, Errc::corrupt_chunk (message carries the byte
/// offset) or Errc::unsupported_sample_format.
Recording parse_xdf(std::span<const std::uint8_t> bytes);
Recording read_xdf(const std::filesystem::path& path);

}  // namespace nxs::io
