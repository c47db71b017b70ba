#pragma once

#include <spdlog/spdlog.h>

namespace nxs {

/// Shared stderr logger. Level comes from the NXS_LOG environment variable
/// (trace, debug, info, warn, error, off); default warn.
spdlog::logger& logger();

}  // namespace nxs
