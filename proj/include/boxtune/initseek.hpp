#pragma once

#include <optional>
#include <vector>

#include "boxtune/corpus.hpp"
#include "boxtune/oracle.hpp"
#include "boxtune/subspace.hpp"
#include "boxtune/verbalizer.hpp"

namespace boxtune {

/// Token-level prompt pattern. kPrompt marks where the continuous prompt
/// attaches (it contributes no tokens), text slots take the input sentences,
/// and exactly one kMask marks the scoring position.
struct PromptTemplate {
  enum class Slot { kPrompt, kText0, kText1, kMask, kLiteral };
  struct Item {
    Slot slot = Slot::kLiteral;
    int literal_token = -1;
  };

  std::vector<Item> items;
  int arity = 1;       // sentence slots the task provides (1 or 2)
  int mask_token = 0;  // vocabulary id rendered at the mask position

  /// [P] [S] (literals...) [MASK]
  static PromptTemplate single_sentence(int mask_token,
                                        std::vector<int> literals = {});
  /// [P] [S1] [MASK] (literals...) [S2]
  static PromptTemplate sentence_pair(int mask_token,
                                      std::vector<int> literals = {});

  void check() const;
};

/// Task-specific manual instruction prefix.
struct Instruction {
  std::vector<int> tokens;
};

/// One training sample rendered as an in-context demonstration: its text via
/// the template with the mask replaced by the sample's verbalized label.
struct Demonstration {
  int source_index = -1;
  std::vector<int> rendered;
};

struct RenderedSequence {
  std::vector<int> tokens;
  int mask_pos = -1;
};

std::vector<int> render_demonstration(const LabeledExample& sample,
                                      int label_token,
                                      const PromptTemplate& tmpl);

/// instruction ++ demonstration ++ templated input; returns the mask index.
RenderedSequence render_prompt_text(const Instruction& instruction,
                                    const std::optional<Demonstration>& demo,
                                    const LabeledExample& input,
                                    const PromptTemplate& tmpl);

/// p0 for the input layer: mean embedding of the sequence tokens. Deeper
/// layers start from zero prompts.
PromptVector embed_initial_prompt(const std::vector<int>& tokens,
                                  const SimulatedModelSpec& model);

struct DemoSearchResult {
  Demonstration selected;
  std::vector<double> accuracy_by_candidate;  // indexed by training sample
  std::vector<double> loss_by_candidate;
  std::int64_t evaluations = 0;
};

/// Exhaustive demonstration search: every training sample is tried as the
/// demonstration (zero tunable prompt) and scored by validation accuracy,
/// one oracle batch evaluation per candidate. Ties keep the lowest index.
/// layers/width describe the prompt shape the backend expects.
DemoSearchResult select_demonstration(const FewShotCorpus& corpus,
                                      const Instruction& instruction,
                                      const PromptTemplate& tmpl,
                                      OracleClient& oracle,
                                      const VerbalizerSet& verbalizers,
                                      int layers, int width);

}  // namespace boxtune
