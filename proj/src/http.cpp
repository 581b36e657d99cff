#include "conspigraph/http.hpp"

#include <httplib.h>

namespace conspigraph::http {

namespace {

class HttplibClient final : public Client {
 public:
  explicit HttplibClient(std::string user_agent) : user_agent_(std::move(user_agent)) {}

  Response head(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) override {
    auto cli = connect(target, timeout);
    auto started = std::chrono::steady_clock::now();
    auto res = cli->Head(target.request_target(), headers());
    if (!res) return failure(res.error(), started, timeout);
    return from(*res);
  }

  Response get_headers(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) override {
    auto cli = connect(target, timeout);
    auto started = std::chrono::steady_clock::now();
    Response out;
    bool seen = false;
    auto res = cli->Get(
        target.request_target(), headers(),
        [&](const httplib::Response& r) {
          out = from(r);
          seen = true;
          return false;  // body not needed
        },
        [](const char*, std::size_t) { return false; });
    if (seen) return out;
    if (!res) return failure(res.error(), started, timeout);
    return from(*res);
  }

  Response get(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) override {
    auto cli = connect(target, timeout);
    auto started = std::chrono::steady_clock::now();
    auto res = cli->Get(target.request_target(), headers());
    if (!res) return failure(res.error(), started, timeout);
    Response out = from(*res);
    out.body = res->body;
    return out;
  }

 private:
  std::unique_ptr<httplib::Client> connect(const url::NormalizedUrl& target, std::chrono::milliseconds timeout) {
    std::string origin = target.scheme + "://" + target.ascii_host();
    if (target.port) origin += ":" + std::to_string(*target.port);
    auto cli = std::make_unique<httplib::Client>(origin);
    cli->set_follow_location(false);
    cli->set_connection_timeout(timeout);
    cli->set_read_timeout(timeout);
    cli->set_write_timeout(timeout);
    cli->enable_server_certificate_verification(true);
    return cli;
  }

  httplib::Headers headers() const { return {{"User-Agent", user_agent_}}; }

  static Response from(const httplib::Response& r) {
    Response out;
    out.status = r.status;
    if (r.has_header("Location")) out.location = r.get_header_value("Location");
    return out;
  }

  static Response failure(httplib::Error err, std::chrono::steady_clock::time_point started,
                          std::chrono::milliseconds timeout) {
    Response out;
    auto elapsed = std::chrono::steady_clock::now() - started;
    // httplib reports an expired read as a plain read error.
    bool timed_out = err == httplib::Error::ConnectionTimeout ||
                     ((err == httplib::Error::Read || err == httplib::Error::Write) && elapsed >= timeout);
    out.failure = timed_out ? Failure::timeout : Failure::network;
    return out;
  }

  std::string user_agent_;
};

}  // namespace

std::unique_ptr<Client> make_default_client(std::string user_agent) {
  return std::make_unique<HttplibClient>(std::move(user_agent));
}

}  // namespace conspigraph::http
