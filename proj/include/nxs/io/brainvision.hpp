#pragma once

#include <filesystem>

#include "nxs/io/recording.hpp"

namespace nxs::io {

/// Reads a BrainVision header/marker/data triple from the .vhdr path.
/// Multiplexed binary data in IEEE_FLOAT_32 or INT_16, scaled by each
/// channel's resolution. Markers (Mk<n>=type,description,position,...)
/// are stamped position / fs; the label is the description (or the type
/// when empty) and the code is its trailing integer, if any.
///
/// Throws Errc::missing_section, Errc::unsupported_binary_format,
/// Errc::file_size_mismatch or Errc::io_error.
Recording read_brainvision(const std::filesystem::path& vhdr);

}  // namespace nxs::io
