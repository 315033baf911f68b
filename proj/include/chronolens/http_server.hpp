#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "chronolens/api.hpp"

namespace chronolens {

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  /// Directory served under `/` (e.g. a built web UI); optional.
  std::optional<std::filesystem::path> static_dir;
};

/// Serves `api` over HTTP until the process is stopped. Returns false when
/// the socket cannot be bound.
bool serve(const Api& api, const ServerOptions& options);

} // namespace chronolens
