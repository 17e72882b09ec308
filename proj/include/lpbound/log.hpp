#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace lpbound {

/// The library logger. It writes to stderr; the level comes from LPBOUND_LOG
/// (trace, debug, info, warn, error, off) and defaults to warn.
spdlog::logger& log();

}  // namespace lpbound
