#pragma once

#include <cstdint>
#include <vector>

#include "boxtune/corpus.hpp"
#include "boxtune/initseek.hpp"
#include "boxtune/oracle.hpp"
#include "boxtune/verbalizer.hpp"

namespace boxtune {

struct FixtureOptions {
  std::uint64_t seed = 7;
  int classes = 2;
  int shots = 16;  // k per class per split
  int layers = 3;
  int width = 128;      // prompt / hidden width D
  int vocab = 96;       // vocabulary size V including the mask token
  int seq_len = 16;     // tokens per synthetic sentence
  int signal_tokens_per_class = 4;
  double signal_prob = 0.85;  // chance a sentence token comes from the class's signal set
  int instruction_len = 4;
  // model weight scales, relative to 1/sqrt(width)
  double input_gain = 16.0;
  double hidden_gain = 1.5;
  double prompt_gain = 6.0;
};

/// A complete synthetic classification task: few-shot corpus, frozen model,
/// default single-token verbalizers, a manual instruction, the prompt
/// template, and the per-class signal token blocks used to generate texts.
struct FixtureTask {
  FewShotCorpus corpus;
  SimulatedModelSpec model;
  VerbalizerSet manual_verbalizers;
  Instruction instruction;
  PromptTemplate prompt_template;
  std::vector<std::vector<int>> class_signal_tokens;
  FixtureOptions options;
};

/// Deterministically synthesizes a learnable-but-noisy task: class texts are
/// drawn from per-class token distributions and the model's output head is
/// tied to the embedding table, so prompt-space steering can raise accuracy
/// above the near-chance zero-prompt baseline.
FixtureTask make_fixture_task(const FixtureOptions& options);
FixtureTask make_fixture_task(std::uint64_t seed, int classes, int shots);

}  // namespace boxtune
