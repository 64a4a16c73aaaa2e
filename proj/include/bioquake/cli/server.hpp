#pragma once

#include <map>
#include <optional>
#include <string>

#include "bioquake/cli/envelope.hpp"

namespace bioquake::cli {

struct ApiResponse {
  int status = 200;
  json body;
};

/// Request handlers, independent of the transport. Validation failures give
/// status 400 with {"error": message, "field": name-or-null}.
ApiResponse api_uncertainty(const std::string& body);
ApiResponse api_plan(const std::string& body);
ApiResponse api_min_error(const std::string& body);
ApiResponse api_curve(const std::multimap<std::string, std::string>& query);

struct ServerOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> static_dir;
};

/// Blocks until the server stops. Returns non-zero when binding fails.
int serve(const ServerOptions& options);

}  // namespace bioquake::cli
