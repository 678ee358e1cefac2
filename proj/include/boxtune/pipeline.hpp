#pragma once

#include <optional>
#include <vector>

#include "boxtune/corpus.hpp"
#include "boxtune/initseek.hpp"
#include "boxtune/oracle.hpp"
#include "boxtune/scheduler.hpp"
#include "boxtune/subspace.hpp"
#include "boxtune/verbalizer.hpp"

namespace boxtune {

/// Per-layer frozen projections plus the measured embedding std they were
/// scaled from. Layer l's seed is base_seed + l; its sigma_z matches the
/// step size of the optimizer that will search that layer.
struct SubspaceBundle {
  std::vector<ProjectionMatrix> projections;
  std::vector<double> sigma_a;
  double sigma_hat = 0.0;
};

SubspaceBundle make_layer_subspaces(const TwoStageConfig& config,
                                    double sigma_hat, int prompt_dim);

/// Prompted classification task over a black-box oracle: candidate intrinsic
/// vectors are mapped through the per-layer subspaces, composed with p0, and
/// scored by cross-entropy over the verbalizer-averaged class probabilities.
class PromptedTask : public TunableTask {
 public:
  PromptedTask(OracleClient& client, const FewShotCorpus& corpus,
               const PromptTemplate& tmpl, const Instruction& instruction,
               std::optional<Demonstration> demo, VerbalizerSet verbalizers,
               std::vector<PromptVector> p0, SubspaceBundle subspaces);

  int layers() const override { return static_cast<int>(p0_.size()); }
  int intrinsic_dim() const override {
    return subspaces_.projections.front().intrinsic_dim();
  }
  double evaluate_train(const std::vector<Eigen::VectorXd>& zs) override;
  ValMetrics probe_validation(const std::vector<Eigen::VectorXd>& zs) override;
  ValMetrics probe_train(const std::vector<Eigen::VectorXd>& zs) override;
  std::int64_t oracle_calls() const override { return client_.calls(); }

  /// Composed per-layer prompts p = p0 + Pi z for inspection/manifests.
  std::vector<Eigen::VectorXd> prompts_for(
      const std::vector<Eigen::VectorXd>& zs) const;

 private:
  OracleRequest build_request(const std::vector<Eigen::VectorXd>& zs,
                              const std::vector<BatchItem>& items) const;
  ValMetrics metrics_from(const OracleResponse& response,
                          const std::vector<int>& labels) const;

  OracleClient& client_;
  VerbalizerSet verbalizers_;
  std::vector<PromptVector> p0_;
  SubspaceBundle subspaces_;
  std::vector<BatchItem> train_items_, val_items_;
  std::vector<int> train_labels_, val_labels_;
};

/// Zero-prompt probe for auto verbalizer generation: renders the given
/// examples and returns the mean mask-position distribution. Each invocation
/// is one counted oracle call.
MaskProbeFn make_zero_prompt_probe(OracleClient& client,
                                   const PromptTemplate& tmpl,
                                   const Instruction& instruction,
                                   const std::optional<Demonstration>& demo,
                                   int layers, int width);

}  // namespace boxtune
