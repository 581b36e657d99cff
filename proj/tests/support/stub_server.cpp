#include "stub_server.hpp"

#include <httplib.h>

namespace stub {

Server::Server() : srv_(std::make_unique<httplib::Server>()) {
  auto logged = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      Request r;
      r.host = req.get_header_value("Host");
      if (auto c = r.host.find(':'); c != std::string::npos) r.host.resize(c);
      r.method = req.method;
      r.path = req.path;
      r.entered = std::chrono::steady_clock::now();
      handler(req, res);
      r.left = std::chrono::steady_clock::now();
      std::lock_guard lk(mu_);
      log_.push_back(std::move(r));
    };
  };
  auto redirect = [](httplib::Response& res, const std::string& to) {
    res.status = 301;
    res.set_header("Location", to);
  };

  srv_->Get(R"(/hop/(\w+))", logged([redirect](const httplib::Request& req, httplib::Response& res) {
              redirect(res, "/final/" + req.matches[1].str());
            }));
  srv_->Get(R"(/final/(\w+))", logged([](const httplib::Request&, httplib::Response& res) {
              res.set_content("ok", "text/plain");
            }));
  srv_->Get("/loop", logged([redirect](const httplib::Request&, httplib::Response& res) { redirect(res, "/loop"); }));
  srv_->Get("/ping", logged([redirect](const httplib::Request&, httplib::Response& res) { redirect(res, "/pong"); }));
  srv_->Get("/pong", logged([redirect](const httplib::Request&, httplib::Response& res) { redirect(res, "/ping"); }));
  srv_->Get(R"(/nohead/(\w+))", logged([redirect](const httplib::Request& req, httplib::Response& res) {
              if (req.method == "HEAD") {
                res.status = 405;
                return;
              }
              redirect(res, "/final/" + req.matches[1].str());
            }));
  srv_->Get("/gone", logged([](const httplib::Request&, httplib::Response& res) { res.status = 404; }));
  srv_->Get("/slow", logged([](const httplib::Request&, httplib::Response& res) {
              std::this_thread::sleep_for(std::chrono::milliseconds(1500));
              res.set_content("late", "text/plain");
            }));

  port_ = srv_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { srv_->listen_after_bind(); });
  srv_->wait_until_ready();
}

Server::~Server() {
  srv_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string Server::base(const std::string& host) const { return "http://" + host + ":" + std::to_string(port_); }

std::vector<Request> Server::log() const {
  std::lock_guard lk(mu_);
  return log_;
}

std::size_t Server::requests() const {
  std::lock_guard lk(mu_);
  return log_.size();
}

}  // namespace stub
