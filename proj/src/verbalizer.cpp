#include "boxtune/verbalizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace boxtune {

const char* token_source_name(TokenSource source) {
  switch (source) {
    case TokenSource::kManual: return "manual";
    case TokenSource::kTfidf: return "tfidf";
    case TokenSource::kAuto: return "auto";
  }
  return "unknown";
}

TokenSource token_source_from_name(const std::string& name) {
  if (name == "manual") return TokenSource::kManual;
  if (name == "tfidf") return TokenSource::kTfidf;
  if (name == "auto") return TokenSource::kAuto;
  throw std::invalid_argument("unknown verbalizer provenance: " + name);
}

void VerbalizerSet::check(const Vocabulary& vocab) const {
  if (classes.empty()) throw std::invalid_argument("VerbalizerSet: no classes");
  std::set<int> seen;
  for (const auto& cls : classes) {
    if (cls.empty()) {
      throw std::invalid_argument("VerbalizerSet: class with no tokens");
    }
    for (const VerbalizerToken& vt : cls) {
      if (!vocab.contains(vt.token)) {
        throw std::invalid_argument("VerbalizerSet: token outside vocabulary");
      }
      if (!seen.insert(vt.token).second) {
        throw std::invalid_argument("VerbalizerSet: token claimed by two classes");
      }
    }
  }
}

VerbalizerSet single_token_set(const std::vector<int>& tokens) {
  VerbalizerSet out;
  out.classes.reserve(tokens.size());
  for (int t : tokens) {
    out.classes.push_back({VerbalizerToken{t, TokenSource::kManual}});
  }
  return out;
}

ClassScores score_classes(const Eigen::VectorXd& mask_token_probs,
                          const VerbalizerSet& verbalizers, bool renormalize) {
  const int num_classes = verbalizers.num_classes();
  if (num_classes == 0) {
    throw std::invalid_argument("score_classes: empty verbalizer set");
  }
  ClassScores out;
  out.probs.resize(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    const auto& tokens = verbalizers.classes[c];
    if (tokens.empty()) {
      throw std::invalid_argument("score_classes: class with no tokens");
    }
    double sum = 0.0;
    for (const VerbalizerToken& vt : tokens) {
      if (vt.token < 0 || vt.token >= mask_token_probs.size()) {
        throw std::invalid_argument("score_classes: token index out of range");
      }
      const double p = mask_token_probs(vt.token);
      if (p < 0.0) {
        throw std::invalid_argument("score_classes: negative probability");
      }
      sum += p;
    }
    out.probs(c) = sum / static_cast<double>(tokens.size());
  }
  if (renormalize) {
    const double total = out.probs.sum();
    if (total <= 0.0) {
      throw std::invalid_argument("score_classes: cannot renormalize zero mass");
    }
    out.probs /= total;
    out.normalized = true;
  }
  return out;
}

std::vector<std::vector<RankedToken>> tfidf_candidates(
    const FewShotCorpus& corpus, int k_per_class) {
  if (k_per_class < 1) {
    throw std::invalid_argument("tfidf_candidates: k_per_class must be >= 1");
  }
  if (corpus.train.empty()) {
    throw std::invalid_argument("tfidf_candidates: empty corpus");
  }
  const int num_classes = corpus.num_classes;
  // Class-level documents: term counts over each class's concatenated texts.
  std::vector<std::map<int, int>> term_counts(num_classes);
  for (const LabeledExample& e : corpus.train) {
    for (int t : e.tokens) ++term_counts[e.label][t];
  }
  for (int c = 0; c < num_classes; ++c) {
    if (term_counts[c].empty()) {
      throw std::invalid_argument("tfidf_candidates: class with empty text");
    }
  }
  std::map<int, int> doc_freq;  // number of class documents containing token
  for (int c = 0; c < num_classes; ++c) {
    for (const auto& [token, count] : term_counts[c]) ++doc_freq[token];
  }

  std::vector<std::vector<RankedToken>> out(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    std::vector<RankedToken> ranked;
    ranked.reserve(term_counts[c].size());
    for (const auto& [token, count] : term_counts[c]) {
      const double idf = std::log((1.0 + num_classes) /
                                  (1.0 + static_cast<double>(doc_freq[token])));
      ranked.push_back({token, static_cast<double>(count) * idf});
    }
    std::sort(ranked.begin(), ranked.end(),
              [&](const RankedToken& a, const RankedToken& b) {
                if (a.score != b.score) return a.score > b.score;
                return corpus.vocab.name(a.token) < corpus.vocab.name(b.token);
              });
    if (static_cast<int>(ranked.size()) > k_per_class) {
      ranked.resize(k_per_class);
    }
    out[c] = std::move(ranked);
  }
  return out;
}

std::vector<std::vector<RankedToken>> auto_candidates(
    const FewShotCorpus& corpus, const MaskProbeFn& probe, int k_per_class) {
  if (k_per_class < 1) {
    throw std::invalid_argument("auto_candidates: k_per_class must be >= 1");
  }
  if (!probe) throw std::invalid_argument("auto_candidates: no probe function");
  const int num_classes = corpus.num_classes;
  std::vector<std::vector<RankedToken>> out(num_classes);
  std::set<int> claimed;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<LabeledExample> class_examples;
    for (const LabeledExample& e : corpus.train) {
      if (e.label == c) class_examples.push_back(e);
    }
    const Eigen::VectorXd mean_probs = probe(class_examples);
    std::vector<RankedToken> ranked;
    ranked.reserve(mean_probs.size());
    for (int t = 0; t < mean_probs.size(); ++t) {
      if (claimed.count(t)) continue;
      ranked.push_back({t, mean_probs(t)});
    }
    std::sort(ranked.begin(), ranked.end(),
              [&](const RankedToken& a, const RankedToken& b) {
                if (a.score != b.score) return a.score > b.score;
                return corpus.vocab.name(a.token) < corpus.vocab.name(b.token);
              });
    if (static_cast<int>(ranked.size()) > k_per_class) {
      ranked.resize(k_per_class);
    }
    for (const RankedToken& rt : ranked) claimed.insert(rt.token);
    out[c] = std::move(ranked);
  }
  return out;
}

VerbalizerSet assemble_m2(const VerbalizerSet& manual,
                          const std::vector<std::vector<RankedToken>>& tfidf,
                          const std::vector<std::vector<RankedToken>>& auto_ranked,
                          int per_class_cap) {
  if (per_class_cap < 1) {
    throw std::invalid_argument("assemble_m2: per_class_cap must be >= 1");
  }
  const int num_classes = manual.num_classes();
  if (!tfidf.empty() && static_cast<int>(tfidf.size()) != num_classes) {
    throw std::invalid_argument("assemble_m2: tfidf class count mismatch");
  }
  if (!auto_ranked.empty() &&
      static_cast<int>(auto_ranked.size()) != num_classes) {
    throw std::invalid_argument("assemble_m2: auto class count mismatch");
  }

  VerbalizerSet out;
  out.classes.resize(num_classes);
  std::set<int> claimed;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<VerbalizerToken> merged;
    auto push = [&](int token, TokenSource source) {
      if (static_cast<int>(merged.size()) >= per_class_cap) return;
      for (const VerbalizerToken& vt : merged) {
        if (vt.token == token) return;  // first occurrence keeps its provenance
      }
      if (claimed.count(token)) return;  // first-claim priority across classes
      merged.push_back({token, source});
    };
    for (const VerbalizerToken& vt : manual.classes[c]) push(vt.token, vt.source);
    if (!tfidf.empty()) {
      for (const RankedToken& rt : tfidf[c]) push(rt.token, TokenSource::kTfidf);
    }
    if (!auto_ranked.empty()) {
      for (const RankedToken& rt : auto_ranked[c]) push(rt.token, TokenSource::kAuto);
    }
    if (merged.empty()) {
      throw std::invalid_argument("assemble_m2: class ended up with no tokens");
    }
    for (const VerbalizerToken& vt : merged) claimed.insert(vt.token);
    out.classes[c] = std::move(merged);
  }
  return out;
}

}  // namespace boxtune
