#pragma once

#include <string>
#include <vector>

namespace boxtune {

/// Opaque token universe: tokens are indices into a string table.
struct Vocabulary {
  std::vector<std::string> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  const std::string& name(int id) const { return tokens.at(id); }
  /// Returns -1 when the token is unknown.
  int index_of(const std::string& token) const;
  bool contains(int id) const { return id >= 0 && id < size(); }
};

struct LabeledExample {
  std::vector<int> tokens;
  std::vector<int> tokens2;  // second sentence; empty for single-sentence tasks
  int label = 0;
};

/// k labeled examples per class in each of the train and validation splits.
struct FewShotCorpus {
  Vocabulary vocab;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  int num_classes = 0;
  int shots_per_class = 0;

  /// Validates the k-per-class-per-split invariant and label/token ranges.
  void check() const;
};

}  // namespace boxtune
