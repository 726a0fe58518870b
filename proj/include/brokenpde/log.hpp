#pragma once

#include <spdlog/spdlog.h>

namespace brokenpde {

/// Shared stderr logger. Its level comes from BROKENPDE_LOG
/// (error, info or debug; default error).
spdlog::logger& log();

}  // namespace brokenpde
