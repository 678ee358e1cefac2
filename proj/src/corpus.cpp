#include "boxtune/corpus.hpp"

#include <stdexcept>

namespace boxtune {

int Vocabulary::index_of(const std::string& token) const {
  for (int i = 0; i < size(); ++i) {
    if (tokens[i] == token) return i;
  }
  return -1;
}

void FewShotCorpus::check() const {
  if (num_classes < 1) throw std::invalid_argument("FewShotCorpus: no classes");
  std::vector<int> train_counts(num_classes, 0), val_counts(num_classes, 0);
  auto scan = [&](const std::vector<LabeledExample>& split,
                  std::vector<int>& counts) {
    for (const LabeledExample& e : split) {
      if (e.label < 0 || e.label >= num_classes) {
        throw std::invalid_argument("FewShotCorpus: label out of range");
      }
      for (int t : e.tokens) {
        if (!vocab.contains(t)) {
          throw std::invalid_argument("FewShotCorpus: token outside vocabulary");
        }
      }
      for (int t : e.tokens2) {
        if (!vocab.contains(t)) {
          throw std::invalid_argument("FewShotCorpus: token outside vocabulary");
        }
      }
      ++counts[e.label];
    }
  };
  scan(train, train_counts);
  scan(validation, val_counts);
  for (int c = 0; c < num_classes; ++c) {
    if (train_counts[c] != shots_per_class || val_counts[c] != shots_per_class) {
      throw std::invalid_argument(
          "FewShotCorpus: expected exactly k examples per class per split");
    }
  }
}

}  // namespace boxtune
