#pragma once

#include <spdlog/spdlog.h>

namespace vorocrust {

/// Configure the default logger from VOROCRUST_LOG (trace, debug, info,
/// warn, error, off). Defaults to warn. Safe to call more than once.
void init_logging();

}  // namespace vorocrust
