#include "boxtune/initseek.hpp"

#include <algorithm>
#include <stdexcept>

namespace boxtune {

PromptTemplate PromptTemplate::single_sentence(int mask_token,
                                               std::vector<int> literals) {
  PromptTemplate t;
  t.arity = 1;
  t.mask_token = mask_token;
  t.items.push_back({Slot::kPrompt, -1});
  t.items.push_back({Slot::kText0, -1});
  for (int lit : literals) t.items.push_back({Slot::kLiteral, lit});
  t.items.push_back({Slot::kMask, -1});
  t.check();
  return t;
}

PromptTemplate PromptTemplate::sentence_pair(int mask_token,
                                             std::vector<int> literals) {
  PromptTemplate t;
  t.arity = 2;
  t.mask_token = mask_token;
  t.items.push_back({Slot::kPrompt, -1});
  t.items.push_back({Slot::kText0, -1});
  t.items.push_back({Slot::kMask, -1});
  for (int lit : literals) t.items.push_back({Slot::kLiteral, lit});
  t.items.push_back({Slot::kText1, -1});
  t.check();
  return t;
}

void PromptTemplate::check() const {
  if (arity != 1 && arity != 2) {
    throw std::invalid_argument("PromptTemplate: arity must be 1 or 2");
  }
  int masks = 0, text0 = 0, text1 = 0;
  for (const Item& item : items) {
    switch (item.slot) {
      case Slot::kMask: ++masks; break;
      case Slot::kText0: ++text0; break;
      case Slot::kText1: ++text1; break;
      case Slot::kLiteral:
        if (item.literal_token < 0) {
          throw std::invalid_argument("PromptTemplate: literal without token");
        }
        break;
      default: break;
    }
  }
  if (masks != 1) {
    throw std::invalid_argument("PromptTemplate: exactly one mask required");
  }
  if (text0 != 1) {
    throw std::invalid_argument("PromptTemplate: missing first sentence slot");
  }
  if ((arity == 2) != (text1 == 1)) {
    throw std::invalid_argument("PromptTemplate: sentence slots do not match arity");
  }
}

namespace {

void append_input(std::vector<int>& out, const LabeledExample& input,
                  const PromptTemplate& tmpl, bool mask_as_label,
                  int label_token, int* mask_pos) {
  for (const PromptTemplate::Item& item : tmpl.items) {
    switch (item.slot) {
      case PromptTemplate::Slot::kPrompt:
        break;  // continuous prompt, contributes no tokens
      case PromptTemplate::Slot::kText0:
        out.insert(out.end(), input.tokens.begin(), input.tokens.end());
        break;
      case PromptTemplate::Slot::kText1:
        if (input.tokens2.empty()) {
          throw std::invalid_argument("render: pair template but single-sentence example");
        }
        out.insert(out.end(), input.tokens2.begin(), input.tokens2.end());
        break;
      case PromptTemplate::Slot::kMask:
        if (mask_as_label) {
          out.push_back(label_token);
        } else {
          if (mask_pos) *mask_pos = static_cast<int>(out.size());
          out.push_back(tmpl.mask_token);
        }
        break;
      case PromptTemplate::Slot::kLiteral:
        out.push_back(item.literal_token);
        break;
    }
  }
}

}  // namespace

std::vector<int> render_demonstration(const LabeledExample& sample,
                                      int label_token,
                                      const PromptTemplate& tmpl) {
  tmpl.check();
  std::vector<int> out;
  append_input(out, sample, tmpl, /*mask_as_label=*/true, label_token, nullptr);
  return out;
}

RenderedSequence render_prompt_text(const Instruction& instruction,
                                    const std::optional<Demonstration>& demo,
                                    const LabeledExample& input,
                                    const PromptTemplate& tmpl) {
  tmpl.check();
  RenderedSequence out;
  out.tokens = instruction.tokens;
  if (demo.has_value()) {
    out.tokens.insert(out.tokens.end(), demo->rendered.begin(),
                      demo->rendered.end());
  }
  append_input(out.tokens, input, tmpl, /*mask_as_label=*/false, -1,
               &out.mask_pos);
  return out;
}

PromptVector embed_initial_prompt(const std::vector<int>& tokens,
                                  const SimulatedModelSpec& model) {
  if (tokens.empty()) {
    throw std::invalid_argument("embed_initial_prompt: empty token sequence");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.width);
  for (int t : tokens) {
    if (t < 0 || t >= model.vocab_size) {
      throw std::invalid_argument("embed_initial_prompt: unknown token");
    }
    mean += model.embedding.row(t).transpose();
  }
  PromptVector p0;
  p0.values = mean / static_cast<double>(tokens.size());
  p0.layer_index = 0;
  return p0;
}

DemoSearchResult select_demonstration(const FewShotCorpus& corpus,
                                      const Instruction& instruction,
                                      const PromptTemplate& tmpl,
                                      OracleClient& oracle,
                                      const VerbalizerSet& verbalizers,
                                      int layers, int width) {
  if (corpus.train.empty()) {
    throw std::invalid_argument("select_demonstration: empty training set");
  }
  if (corpus.validation.empty()) {
    throw std::invalid_argument("select_demonstration: empty validation set");
  }
  if (layers < 1 || width < 1) {
    throw std::invalid_argument("select_demonstration: bad prompt shape");
  }
  verbalizers.check(corpus.vocab);

  const std::vector<Eigen::VectorXd> zero_prompts(
      layers, Eigen::VectorXd::Zero(width));

  DemoSearchResult result;
  result.accuracy_by_candidate.reserve(corpus.train.size());
  result.loss_by_candidate.reserve(corpus.train.size());

  double best_accuracy = -1.0;

  for (std::size_t j = 0; j < corpus.train.size(); ++j) {
    const LabeledExample& sample = corpus.train[j];
    Demonstration demo;
    demo.source_index = static_cast<int>(j);
    demo.rendered = render_demonstration(
        sample, verbalizers.primary_token(sample.label), tmpl);

    OracleRequest request;
    request.request_id = j;
    request.prompts = zero_prompts;
    for (const LabeledExample& v : corpus.validation) {
      RenderedSequence seq = render_prompt_text(instruction, demo, v, tmpl);
      BatchItem item;
      item.tokens = std::move(seq.tokens);
      item.mask_pos = seq.mask_pos;
      item.label_token = verbalizers.primary_token(v.label);
      request.batch.push_back(std::move(item));
    }

    OracleResponse response;
    try {
      response = oracle.evaluate(request);
    } catch (const std::exception& e) {
      throw std::runtime_error(
          std::string("select_demonstration: oracle failure after ") +
          std::to_string(result.accuracy_by_candidate.size()) +
          " candidates: " + e.what());
    }

    std::vector<int> predictions, labels;
    double loss_sum = 0.0;
    for (std::size_t v = 0; v < corpus.validation.size(); ++v) {
      const ClassScores raw =
          score_classes(response.mask_probs[v], verbalizers, false);
      int argmax = 0;
      raw.probs.maxCoeff(&argmax);
      predictions.push_back(argmax);
      labels.push_back(corpus.validation[v].label);
      const ClassScores norm =
          score_classes(response.mask_probs[v], verbalizers, true);
      loss_sum += cross_entropy(norm, corpus.validation[v].label);
    }
    const double acc = accuracy(predictions, labels);
    result.accuracy_by_candidate.push_back(acc);
    result.loss_by_candidate.push_back(loss_sum / corpus.validation.size());
    ++result.evaluations;
    if (acc > best_accuracy) {
      best_accuracy = acc;
      result.selected = std::move(demo);
    }
  }
  return result;
}

}  // namespace boxtune
