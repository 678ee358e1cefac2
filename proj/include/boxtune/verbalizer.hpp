#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "boxtune/corpus.hpp"

namespace boxtune {

enum class TokenSource { kManual, kTfidf, kAuto };

const char* token_source_name(TokenSource source);
TokenSource token_source_from_name(const std::string& name);

struct VerbalizerToken {
  int token = 0;
  TokenSource source = TokenSource::kManual;
};

/// Per-class label-token lists. Every class has at least one token, no token
/// belongs to two classes, and all tokens are valid vocabulary indices.
struct VerbalizerSet {
  std::vector<std::vector<VerbalizerToken>> classes;

  int num_classes() const { return static_cast<int>(classes.size()); }
  /// First token of a class, used where a single label word is needed.
  int primary_token(int cls) const { return classes.at(cls).at(0).token; }
  void check(const Vocabulary& vocab) const;
};

/// Convenience: one manual token per class.
VerbalizerSet single_token_set(const std::vector<int>& tokens);

struct ClassScores {
  Eigen::VectorXd probs;
  bool normalized = false;
};

/// Class confidence = arithmetic mean of the mask-position probabilities of
/// that class's tokens; optionally renormalized across classes.
ClassScores score_classes(const Eigen::VectorXd& mask_token_probs,
                          const VerbalizerSet& verbalizers,
                          bool renormalize = false);

struct RankedToken {
  int token = 0;
  double score = 0.0;
};

/// Per-class token ranking by tf * log((1+C)/(1+df)) where tf counts
/// occurrences in the class's concatenated training texts and df counts the
/// classes whose texts contain the token. Ties break lexicographically on the
/// token string.
std::vector<std::vector<RankedToken>> tfidf_candidates(
    const FewShotCorpus& corpus, int k_per_class);

/// Mean mask-position probabilities over a set of examples, evaluated by the
/// black box with zero tunable prompt. Supplied by the caller so candidate
/// generation stays independent of any particular oracle backend.
using MaskProbeFn =
    std::function<Eigen::VectorXd(const std::vector<LabeledExample>&)>;

/// Per-class ranking of vocabulary tokens by mean mask-position probability
/// over that class's training examples. Classes claim tokens in ascending
/// class order; a token already claimed is skipped.
std::vector<std::vector<RankedToken>> auto_candidates(
    const FewShotCorpus& corpus, const MaskProbeFn& probe, int k_per_class);

/// Concatenates manual, tf-idf, and auto routes per class, de-duplicates
/// keeping the first occurrence, enforces cross-class disjointness by
/// first-claim priority (ascending class index), and truncates each class to
/// per_class_cap tokens.
VerbalizerSet assemble_m2(const VerbalizerSet& manual,
                          const std::vector<std::vector<RankedToken>>& tfidf,
                          const std::vector<std::vector<RankedToken>>& auto_ranked,
                          int per_class_cap);

}  // namespace boxtune
