#include "boxtune/httpapi.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>

#include "boxtune/wire.hpp"

namespace boxtune {

struct RemoteOracle::Impl {
  std::string host;
  int port;
  int max_retries;
};

RemoteOracle::RemoteOracle(std::string host, int port, int max_retries)
    : impl_(std::make_unique<Impl>(Impl{std::move(host), port, max_retries})) {
  if (impl_->max_retries < 0) {
    throw std::invalid_argument("RemoteOracle: max_retries must be >= 0");
  }
}

RemoteOracle::~RemoteOracle() = default;

OracleResponse RemoteOracle::do_evaluate(const OracleRequest& request) {
  const std::string body = request_to_wire(request);
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= impl_->max_retries; ++attempt) {
    httplib::Client client(impl_->host, impl_->port);
    client.set_read_timeout(60, 0);
    auto result = client.Post("/evaluate", body, "application/json");
    if (!result) {
      last_error = "transport failure: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_error = "server error " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw ProtocolError("remote oracle rejected request with status " +
                          std::to_string(result->status) + ": " + result->body);
    }
    return response_from_wire(result->body);
  }
  throw OracleUnavailable("remote oracle unreachable after " +
                          std::to_string(impl_->max_retries + 1) +
                          " attempts; last error: " + last_error);
}

RemoteOracle make_remote_oracle(const std::string& endpoint, int max_retries) {
  std::string rest = endpoint;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("endpoint must be host:port, got: " + endpoint);
  }
  const std::string host = rest.substr(0, colon);
  const int port = std::stoi(rest.substr(colon + 1));
  if (host.empty() || port <= 0 || port > 65535) {
    throw std::invalid_argument("bad endpoint: " + endpoint);
  }
  return RemoteOracle(host, port, max_retries);
}

struct OracleServer::Impl {
  SimulatedModelSpec spec;
  httplib::Server server;
  std::atomic<std::int64_t> calls{0};
  std::thread worker;

  explicit Impl(SimulatedModelSpec s) : spec(std::move(s)) {
    server.Post("/evaluate", [this](const httplib::Request& req,
                                    httplib::Response& res) {
      OracleRequest request;
      try {
        request = request_from_wire(req.body);
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(std::string("{\"error\":\"") + e.what() + "\"}",
                        "application/json");
        return;
      }
      OracleResponse response;
      try {
        response = simulate_forward(spec, request);
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(std::string("{\"error\":\"") + e.what() + "\"}",
                        "application/json");
        return;
      }
      response.calls = ++calls;
      res.set_content(response_to_wire(response), "application/json");
    });
  }
};

OracleServer::OracleServer(SimulatedModelSpec spec)
    : impl_(std::make_unique<Impl>(std::move(spec))) {}

OracleServer::~OracleServer() {
  stop();
}

void OracleServer::serve(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->server.listen_after_bind();
}

int OracleServer::serve_in_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) {
    throw std::runtime_error("cannot bind any port on " + host);
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void OracleServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

std::int64_t OracleServer::calls() const { return impl_->calls.load(); }

}  // namespace boxtune
