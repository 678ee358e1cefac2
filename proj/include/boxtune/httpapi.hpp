#pragma once

#include <memory>
#include <string>

#include "boxtune/oracle.hpp"

namespace boxtune {

class OracleUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// HTTP client for a remote scoring service speaking the wire protocol.
/// Transport failures and 5xx responses retry idempotently up to max_retries;
/// the local call counter advances exactly once per successful evaluation.
class RemoteOracle : public OracleClient {
 public:
  RemoteOracle(std::string host, int port, int max_retries = 3);
  ~RemoteOracle() override;

 protected:
  OracleResponse do_evaluate(const OracleRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses "host:port" or "http://host:port".
RemoteOracle make_remote_oracle(const std::string& endpoint, int max_retries = 3);

/// Loopback scoring service over a simulated model. Serves POST /evaluate;
/// malformed requests get a protocol-error response without advancing the
/// server-side counter.
class OracleServer {
 public:
  explicit OracleServer(SimulatedModelSpec spec);
  ~OracleServer();

  /// Binds and serves on the given port; blocks until stop(). Throws if the
  /// port cannot be bound.
  void serve(const std::string& host, int port);
  /// Binds an OS-chosen port and serves in a background thread (tests).
  int serve_in_background(const std::string& host);
  void stop();

  std::int64_t calls() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace boxtune
