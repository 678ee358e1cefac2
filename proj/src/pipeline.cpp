#include "boxtune/pipeline.hpp"

#include <stdexcept>

namespace boxtune {

SubspaceBundle make_layer_subspaces(const TwoStageConfig& config,
                                    double sigma_hat, int prompt_dim) {
  config.check();
  if (!(sigma_hat > 0.0)) {
    throw std::invalid_argument("make_layer_subspaces: sigma_hat must be positive");
  }
  SubspaceBundle bundle;
  bundle.sigma_hat = sigma_hat;
  for (int l = 0; l < config.layers; ++l) {
    const double sigma_z = (l == 0) ? config.sigma1 : config.sigma2;
    const double sigma_a = compute_sigma_a(
        {config.alpha, sigma_hat, sigma_z, config.intrinsic_dim});
    bundle.sigma_a.push_back(sigma_a);
    bundle.projections.push_back(make_projection(
        config.intrinsic_dim, prompt_dim, sigma_a, config.seed + l));
  }
  return bundle;
}

namespace {

std::vector<BatchItem> render_split(const std::vector<LabeledExample>& split,
                                    const PromptTemplate& tmpl,
                                    const Instruction& instruction,
                                    const std::optional<Demonstration>& demo,
                                    const VerbalizerSet& verbalizers,
                                    std::vector<int>* labels) {
  std::vector<BatchItem> items;
  items.reserve(split.size());
  for (const LabeledExample& e : split) {
    RenderedSequence seq = render_prompt_text(instruction, demo, e, tmpl);
    BatchItem item;
    item.tokens = std::move(seq.tokens);
    item.mask_pos = seq.mask_pos;
    item.label_token = verbalizers.primary_token(e.label);
    items.push_back(std::move(item));
    if (labels) labels->push_back(e.label);
  }
  return items;
}

}  // namespace

PromptedTask::PromptedTask(OracleClient& client, const FewShotCorpus& corpus,
                           const PromptTemplate& tmpl,
                           const Instruction& instruction,
                           std::optional<Demonstration> demo,
                           VerbalizerSet verbalizers,
                           std::vector<PromptVector> p0,
                           SubspaceBundle subspaces)
    : client_(client),
      verbalizers_(std::move(verbalizers)),
      p0_(std::move(p0)),
      subspaces_(std::move(subspaces)) {
  if (p0_.empty() || p0_.size() != subspaces_.projections.size()) {
    throw std::invalid_argument("PromptedTask: p0/projection layer mismatch");
  }
  for (std::size_t l = 0; l < p0_.size(); ++l) {
    if (p0_[l].values.size() != subspaces_.projections[l].prompt_dim()) {
      throw std::invalid_argument("PromptedTask: p0 width mismatch");
    }
  }
  verbalizers_.check(corpus.vocab);
  train_items_ = render_split(corpus.train, tmpl, instruction, demo,
                              verbalizers_, &train_labels_);
  val_items_ = render_split(corpus.validation, tmpl, instruction, demo,
                            verbalizers_, &val_labels_);
}

std::vector<Eigen::VectorXd> PromptedTask::prompts_for(
    const std::vector<Eigen::VectorXd>& zs) const {
  if (zs.size() != p0_.size()) {
    throw std::invalid_argument("PromptedTask: wrong layer count");
  }
  std::vector<Eigen::VectorXd> prompts;
  prompts.reserve(p0_.size());
  for (std::size_t l = 0; l < p0_.size(); ++l) {
    IntrinsicVector z{zs[l], static_cast<int>(l)};
    const PromptVector p_theta = project(subspaces_.projections[l], z);
    prompts.push_back(compose_prompt(p0_[l], p_theta).values);
  }
  return prompts;
}

OracleRequest PromptedTask::build_request(
    const std::vector<Eigen::VectorXd>& zs,
    const std::vector<BatchItem>& items) const {
  OracleRequest request;
  request.prompts = prompts_for(zs);
  request.batch = items;
  return request;
}

ValMetrics PromptedTask::metrics_from(const OracleResponse& response,
                                      const std::vector<int>& labels) const {
  std::vector<int> predictions;
  predictions.reserve(labels.size());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ClassScores raw = score_classes(response.mask_probs[i], verbalizers_);
    int argmax = 0;
    raw.probs.maxCoeff(&argmax);
    predictions.push_back(argmax);
    const ClassScores norm =
        score_classes(response.mask_probs[i], verbalizers_, true);
    loss_sum += cross_entropy(norm, labels[i]);
  }
  ValMetrics m;
  m.loss = loss_sum / static_cast<double>(labels.size());
  m.acc = accuracy(predictions, labels);
  return m;
}

double PromptedTask::evaluate_train(const std::vector<Eigen::VectorXd>& zs) {
  const OracleResponse response = client_.evaluate(build_request(zs, train_items_));
  return metrics_from(response, train_labels_).loss;
}

ValMetrics PromptedTask::probe_validation(const std::vector<Eigen::VectorXd>& zs) {
  const OracleResponse response = client_.measure(build_request(zs, val_items_));
  return metrics_from(response, val_labels_);
}

ValMetrics PromptedTask::probe_train(const std::vector<Eigen::VectorXd>& zs) {
  const OracleResponse response = client_.measure(build_request(zs, train_items_));
  return metrics_from(response, train_labels_);
}

MaskProbeFn make_zero_prompt_probe(OracleClient& client,
                                   const PromptTemplate& tmpl,
                                   const Instruction& instruction,
                                   const std::optional<Demonstration>& demo,
                                   int layers, int width) {
  if (layers < 1 || width < 1) {
    throw std::invalid_argument("make_zero_prompt_probe: bad prompt shape");
  }
  const std::vector<Eigen::VectorXd> zero_prompts(
      layers, Eigen::VectorXd::Zero(width));
  return [&client, tmpl, instruction, demo,
          zero_prompts](const std::vector<LabeledExample>& examples) {
    if (examples.empty()) {
      throw std::invalid_argument("zero-prompt probe: no examples");
    }
    OracleRequest request;
    request.prompts = zero_prompts;
    for (const LabeledExample& e : examples) {
      RenderedSequence seq = render_prompt_text(instruction, demo, e, tmpl);
      BatchItem item;
      item.tokens = std::move(seq.tokens);
      item.mask_pos = seq.mask_pos;
      item.label_token = 0;
      request.batch.push_back(std::move(item));
    }
    const OracleResponse response = client.evaluate(request);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(response.mask_probs[0].size());
    for (const Eigen::VectorXd& p : response.mask_probs) mean += p;
    return Eigen::VectorXd(mean / static_cast<double>(examples.size()));
  };
}

}  // namespace boxtune
