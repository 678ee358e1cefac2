#include <doctest.h>

#include <atomic>
#include <thread>

#include "boxtune/fixture.hpp"
#include "boxtune/httpapi.hpp"
#include "boxtune/oracle.hpp"
#include "boxtune/rng.hpp"
#include "boxtune/wire.hpp"

// httplib last: it drags in system headers whose macros clash with Eigen
#include <httplib.h>

using namespace boxtune;

namespace {

OracleRequest random_request(Rng& rng, int layers, int width, int vocab) {
  OracleRequest request;
  request.request_id = rng.below(1000000);
  for (int l = 0; l < layers; ++l) {
    Eigen::VectorXd p(width);
    for (int i = 0; i < width; ++i) p(i) = rng.normal();
    request.prompts.push_back(std::move(p));
  }
  const int batch = 1 + static_cast<int>(rng.below(4));
  for (int b = 0; b < batch; ++b) {
    BatchItem item;
    const int len = 2 + static_cast<int>(rng.below(6));
    for (int t = 0; t < len; ++t) {
      item.tokens.push_back(static_cast<int>(rng.below(vocab)));
    }
    item.mask_pos = static_cast<int>(rng.below(len));
    item.label_token = static_cast<int>(rng.below(vocab));
    request.batch.push_back(std::move(item));
  }
  return request;
}

}  // namespace

TEST_CASE("wire documents round-trip exactly and stay newline-free") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const OracleRequest request = random_request(rng, 2, 6, 12);
    const std::string body = request_to_wire(request);
    CHECK(body.find('\n') == std::string::npos);
    const OracleRequest back = request_from_wire(body);
    CHECK(back.request_id == request.request_id);
    REQUIRE(back.prompts.size() == request.prompts.size());
    for (std::size_t l = 0; l < back.prompts.size(); ++l) {
      CHECK((back.prompts[l] - request.prompts[l]).cwiseAbs().maxCoeff() == 0.0);
    }
    REQUIRE(back.batch.size() == request.batch.size());
    for (std::size_t b = 0; b < back.batch.size(); ++b) {
      CHECK(back.batch[b].tokens == request.batch[b].tokens);
      CHECK(back.batch[b].mask_pos == request.batch[b].mask_pos);
      CHECK(back.batch[b].label_token == request.batch[b].label_token);
    }

    OracleResponse response;
    response.loss = rng.normal();
    response.calls = static_cast<std::int64_t>(rng.below(100));
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd probs(5);
      for (int j = 0; j < 5; ++j) probs(j) = rng.uniform01();
      response.mask_probs.push_back(probs / probs.sum());
    }
    const std::string rbody = response_to_wire(response);
    CHECK(rbody.find('\n') == std::string::npos);
    const OracleResponse rback = response_from_wire(rbody);
    CHECK(rback.loss == response.loss);
    CHECK(rback.calls == response.calls);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK((rback.mask_probs[i] - response.mask_probs[i]).cwiseAbs().maxCoeff() ==
            0.0);
    }
  }
}

TEST_CASE("malformed wire documents raise protocol errors") {
  CHECK_THROWS_AS(request_from_wire("not json"), ProtocolError);
  CHECK_THROWS_AS(request_from_wire("{\"version\":2,\"prompts\":[],\"batch\":[]}"),
                  ProtocolError);
  CHECK_THROWS_AS(request_from_wire("{\"version\":1}"), ProtocolError);
  CHECK_THROWS_AS(response_from_wire("{\"probs\":[]}"), ProtocolError);
  CHECK_THROWS_AS(response_from_wire("[1,2,3]"), ProtocolError);
}

TEST_CASE("loopback service matches the in-process backend byte for byte") {
  const FixtureTask task = make_fixture_task(5, 2, 4);
  OracleServer server(task.model);
  const int port = server.serve_in_background("127.0.0.1");

  SimulatedOracle local(task.model);
  RemoteOracle remote("127.0.0.1", port);

  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const OracleRequest request =
        random_request(rng, task.model.layers, task.model.width,
                       task.model.vocab_size);
    const OracleResponse a = local.evaluate(request);
    const OracleResponse b = remote.evaluate(request);
    CHECK(a.loss == b.loss);  // exact: JSON doubles round-trip losslessly
    REQUIRE(a.mask_probs.size() == b.mask_probs.size());
    for (std::size_t i = 0; i < a.mask_probs.size(); ++i) {
      CHECK((a.mask_probs[i] - b.mask_probs[i]).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  CHECK(remote.calls() == 5);
  CHECK(server.calls() == 5);
  server.stop();
}

TEST_CASE("a 5xx followed by success counts one call") {
  const FixtureTask task = make_fixture_task(5, 2, 4);
  httplib::Server flaky;
  std::atomic<int> hits{0};
  flaky.Post("/evaluate", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits.fetch_add(1) == 0) {
      res.status = 503;
      return;
    }
    const OracleRequest request = request_from_wire(req.body);
    res.set_content(response_to_wire(simulate_forward(task.model, request)),
                    "application/json");
  });
  const int port = flaky.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { flaky.listen_after_bind(); });
  flaky.wait_until_ready();

  RemoteOracle remote("127.0.0.1", port, /*max_retries=*/3);
  Rng rng(3);
  const OracleRequest request = random_request(
      rng, task.model.layers, task.model.width, task.model.vocab_size);
  const OracleResponse response = remote.evaluate(request);
  CHECK(std::isfinite(response.loss));
  CHECK(remote.calls() == 1);
  CHECK(hits.load() == 2);

  flaky.stop();
  worker.join();
}

TEST_CASE("unreachable endpoints raise oracle-unavailable after retries") {
  RemoteOracle remote("127.0.0.1", 1, /*max_retries=*/1);  // nothing listens
  Rng rng(4);
  const OracleRequest request = random_request(rng, 1, 4, 8);
  CHECK_THROWS_AS(remote.evaluate(request), OracleUnavailable);
  CHECK(remote.calls() == 0);
}

TEST_CASE("malformed requests get a protocol error and are not counted") {
  const FixtureTask task = make_fixture_task(5, 2, 4);
  OracleServer server(task.model);
  const int port = server.serve_in_background("127.0.0.1");

  httplib::Client raw("127.0.0.1", port);
  auto result = raw.Post("/evaluate", "this is not a request", "text/plain");
  REQUIRE(result);
  CHECK(result->status == 400);
  CHECK(server.calls() == 0);

  // shape errors (wrong prompt count) are rejected the same way
  OracleRequest bad;
  bad.prompts.assign(1, Eigen::VectorXd::Zero(task.model.width));
  BatchItem item;
  item.tokens = {1};
  item.mask_pos = 0;
  item.label_token = 1;
  bad.batch.push_back(item);
  auto r2 = raw.Post("/evaluate", request_to_wire(bad), "application/json");
  REQUIRE(r2);
  CHECK(r2->status == 400);
  CHECK(server.calls() == 0);
  server.stop();
}

TEST_CASE("concurrent clients are all served with an exact shared counter") {
  const FixtureTask task = make_fixture_task(5, 2, 4);
  OracleServer server(task.model);
  const int port = server.serve_in_background("127.0.0.1");

  const int per_client = 8;
  auto worker = [&](std::uint64_t seed) {
    RemoteOracle remote("127.0.0.1", port);
    Rng rng(seed);
    for (int i = 0; i < per_client; ++i) {
      const OracleRequest request = random_request(
          rng, task.model.layers, task.model.width, task.model.vocab_size);
      remote.evaluate(request);
    }
  };
  std::thread a(worker, 1), b(worker, 2);
  a.join();
  b.join();
  CHECK(server.calls() == 2 * per_client);
  server.stop();
}
