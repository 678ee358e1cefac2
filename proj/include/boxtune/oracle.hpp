#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cstdint>
#include <vector>

#include "boxtune/corpus.hpp"
#include "boxtune/verbalizer.hpp"

namespace boxtune {

/// Deterministic frozen stand-in for a prompted masked language model.
///
/// Forward pass: the token sequence is pooled to its mean embedding h0, each
/// layer applies h <- tanh(W h + U p) with that layer's prompt vector p, and
/// the mask-position distribution is softmax(E h) with the output head tied
/// to the embedding table. All weights are frozen at construction.
struct SimulatedModelSpec {
  int layers = 0;
  int width = 0;       // D
  int vocab_size = 0;  // V
  Eigen::MatrixXd embedding;              // V x D
  std::vector<Eigen::MatrixXd> hidden_w;  // layers of D x D
  std::vector<Eigen::MatrixXd> prompt_w;  // layers of D x D

  static SimulatedModelSpec make(int layers, int width, int vocab_size,
                                 std::uint64_t seed);
  /// Explicit weight-scale knobs: first hidden transform gain, deeper hidden
  /// gains, and the prompt-injection gain (all relative to 1/sqrt(D)).
  static SimulatedModelSpec make(int layers, int width, int vocab_size,
                                 std::uint64_t seed, double input_gain,
                                 double hidden_gain, double prompt_gain);

  /// Sample std over all entries of the embedding table (sigma_hat).
  double embedding_std() const;
};

struct BatchItem {
  std::vector<int> tokens;
  int mask_pos = 0;
  int label_token = 0;  // gold label verbalizer token (vocabulary index)
};

struct OracleRequest {
  std::vector<Eigen::VectorXd> prompts;  // one length-D vector per layer
  std::vector<BatchItem> batch;
  std::uint64_t request_id = 0;
};

struct OracleResponse {
  std::vector<Eigen::VectorXd> mask_probs;  // per example, length V
  double loss = 0.0;   // mean -log p[label_token] over the batch
  std::int64_t calls = 0;  // counter echo from the serving side
};

/// Pure forward pass; performs no call counting.
OracleResponse simulate_forward(const SimulatedModelSpec& spec,
                                const OracleRequest& request);

/// Black-box access point. evaluate() is the budgeted API call and is the
/// single place the local call counter advances; measure() runs the same
/// computation for bookkeeping probes (metrics curves) without consuming
/// budget. The counter is atomic so candidate evaluations may run
/// concurrently.
class OracleClient {
 public:
  virtual ~OracleClient() = default;

  OracleResponse evaluate(const OracleRequest& request) {
    OracleResponse r = do_evaluate(request);
    r.calls = ++calls_;
    return r;
  }

  OracleResponse measure(const OracleRequest& request) {
    OracleResponse r = do_evaluate(request);
    r.calls = calls_.load();
    return r;
  }

  std::int64_t calls() const { return calls_.load(); }

 protected:
  virtual OracleResponse do_evaluate(const OracleRequest& request) = 0;

 private:
  std::atomic<std::int64_t> calls_{0};
};

/// In-process backend over a simulated model.
class SimulatedOracle : public OracleClient {
 public:
  explicit SimulatedOracle(SimulatedModelSpec spec) : spec_(std::move(spec)) {}
  const SimulatedModelSpec& spec() const { return spec_; }

 protected:
  OracleResponse do_evaluate(const OracleRequest& request) override {
    return simulate_forward(spec_, request);
  }

 private:
  SimulatedModelSpec spec_;
};

/// -log(score[label]); scores must be normalized. Zero probabilities clamp to
/// 1e-12 (warning on stderr).
double cross_entropy(const ClassScores& scores, int label);

double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels);

/// F1 with positive class 1; defined as 0 when precision + recall underflows.
double f1_binary(const std::vector<int>& predictions,
                 const std::vector<int>& labels);

}  // namespace boxtune
