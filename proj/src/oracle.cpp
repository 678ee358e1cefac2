#include "boxtune/oracle.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "boxtune/rng.hpp"

namespace boxtune {

namespace {
// Embedding scale comparable to pretrained word-embedding tables.
constexpr double kEmbeddingStd = 0.1134;
// Gain of the first hidden transform; lifts the weak pooled-embedding signal
// into tanh's responsive range.
constexpr double kInputGain = 16.0;
constexpr double kHiddenGain = 1.5;
constexpr double kPromptGain = 6.0;
}  // namespace

SimulatedModelSpec SimulatedModelSpec::make(int layers, int width,
                                            int vocab_size,
                                            std::uint64_t seed) {
  return make(layers, width, vocab_size, seed, kInputGain, kHiddenGain,
              kPromptGain);
}

SimulatedModelSpec SimulatedModelSpec::make(int layers, int width,
                                            int vocab_size, std::uint64_t seed,
                                            double input_gain,
                                            double hidden_gain,
                                            double prompt_gain) {
  if (layers < 1 || width < 1 || vocab_size < 2) {
    throw std::invalid_argument("SimulatedModelSpec: bad shape");
  }
  SimulatedModelSpec spec;
  spec.layers = layers;
  spec.width = width;
  spec.vocab_size = vocab_size;
  Rng rng(seed);
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(width));

  spec.embedding.resize(vocab_size, width);
  for (int i = 0; i < vocab_size; ++i) {
    for (int j = 0; j < width; ++j) {
      spec.embedding(i, j) = kEmbeddingStd * rng.normal();
    }
  }
  spec.hidden_w.reserve(layers);
  spec.prompt_w.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    const double hidden_scale = (l == 0 ? input_gain : hidden_gain) * inv_sqrt_d;
    Eigen::MatrixXd w(width, width), u(width, width);
    for (int i = 0; i < width; ++i) {
      for (int j = 0; j < width; ++j) w(i, j) = hidden_scale * rng.normal();
    }
    for (int i = 0; i < width; ++i) {
      for (int j = 0; j < width; ++j) u(i, j) = prompt_gain * inv_sqrt_d * rng.normal();
    }
    spec.hidden_w.push_back(std::move(w));
    spec.prompt_w.push_back(std::move(u));
  }
  return spec;
}

double SimulatedModelSpec::embedding_std() const {
  const double n = static_cast<double>(embedding.size());
  const double mean = embedding.mean();
  const double ss = (embedding.array() - mean).square().sum();
  return std::sqrt(ss / (n - 1.0));
}

OracleResponse simulate_forward(const SimulatedModelSpec& spec,
                                const OracleRequest& request) {
  if (static_cast<int>(request.prompts.size()) != spec.layers) {
    throw std::invalid_argument("simulate_forward: expected one prompt per layer");
  }
  for (const Eigen::VectorXd& p : request.prompts) {
    if (p.size() != spec.width) {
      throw std::invalid_argument("simulate_forward: prompt width mismatch");
    }
  }
  if (request.batch.empty()) {
    throw std::invalid_argument("simulate_forward: empty batch");
  }
  const int batch_size = static_cast<int>(request.batch.size());

  Eigen::MatrixXd hidden(spec.width, batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const BatchItem& item = request.batch[b];
    if (item.tokens.empty()) {
      throw std::invalid_argument("simulate_forward: empty token sequence");
    }
    if (item.mask_pos < 0 ||
        item.mask_pos >= static_cast<int>(item.tokens.size())) {
      throw std::invalid_argument("simulate_forward: mask position out of range");
    }
    if (item.label_token < 0 || item.label_token >= spec.vocab_size) {
      throw std::invalid_argument("simulate_forward: label token out of range");
    }
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(spec.width);
    for (int t : item.tokens) {
      if (t < 0 || t >= spec.vocab_size) {
        throw std::invalid_argument("simulate_forward: token out of range");
      }
      pooled += spec.embedding.row(t).transpose();
    }
    hidden.col(b) = pooled / static_cast<double>(item.tokens.size());
  }

  for (int l = 0; l < spec.layers; ++l) {
    const Eigen::VectorXd shift = spec.prompt_w[l] * request.prompts[l];
    hidden = ((spec.hidden_w[l] * hidden).colwise() + shift).array().tanh();
  }

  Eigen::MatrixXd logits = spec.embedding * hidden;  // V x B
  OracleResponse response;
  response.mask_probs.reserve(batch_size);
  double loss_sum = 0.0;
  for (int b = 0; b < batch_size; ++b) {
    Eigen::VectorXd column = logits.col(b);
    const double top = column.maxCoeff();
    Eigen::VectorXd exps = (column.array() - top).exp();
    Eigen::VectorXd probs = exps / exps.sum();
    loss_sum += -std::log(std::max(probs(request.batch[b].label_token), 1e-300));
    response.mask_probs.push_back(std::move(probs));
  }
  response.loss = loss_sum / static_cast<double>(batch_size);
  return response;
}

double cross_entropy(const ClassScores& scores, int label) {
  if (!scores.normalized) {
    throw std::invalid_argument("cross_entropy: scores must be normalized");
  }
  if (label < 0 || label >= scores.probs.size()) {
    throw std::invalid_argument("cross_entropy: label out of range");
  }
  double p = scores.probs(label);
  if (p <= 0.0) {
    std::cerr << "boxtune: cross_entropy clamped zero probability for label "
              << label << "\n";
    p = 1e-12;
  }
  return -std::log(p);
}

double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw std::invalid_argument("accuracy: need equal-length non-empty inputs");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double f1_binary(const std::vector<int>& predictions,
                 const std::vector<int>& labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw std::invalid_argument("f1_binary: need equal-length non-empty inputs");
  }
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    if (predictions[i] == 1 && labels[i] == 0) ++fp;
    if (predictions[i] == 0 && labels[i] == 1) ++fn;
  }
  const double precision = (tp + fp == 0) ? 0.0 : static_cast<double>(tp) / (tp + fp);
  const double recall = (tp + fn == 0) ? 0.0 : static_cast<double>(tp) / (tp + fn);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace boxtune
