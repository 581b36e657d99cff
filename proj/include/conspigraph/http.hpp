#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "conspigraph/url.hpp"

namespace conspigraph::http {

enum class Failure { none, timeout, network };

struct Response {
  Failure failure = Failure::none;
  int status = 0;
  std::optional<std::string> location;
  std::string body;  // only filled by get()
};

/// Minimal client surface used by the resolver and the live metrics source.
/// Implementations never follow redirects themselves.
class Client {
 public:
  virtual ~Client() = default;
  virtual Response head(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) = 0;
  /// GET that stops reading once the status line and headers arrived.
  virtual Response get_headers(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) = 0;
  virtual Response get(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) = 0;
};

/// Client backed by cpp-httplib (HTTP and HTTPS).
std::unique_ptr<Client> make_default_client(std::string user_agent = "conspigraph/1.0");

}  // namespace conspigraph::http
