#include "boxtune/fixture.hpp"

#include <cstdio>
#include <stdexcept>

#include "boxtune/rng.hpp"

namespace boxtune {

namespace {

std::string token_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%03d", index);
  return buf;
}

}  // namespace

FixtureTask make_fixture_task(const FixtureOptions& options) {
  const int C = options.classes;
  const int s = options.signal_tokens_per_class;
  if (C < 2) throw std::invalid_argument("make_fixture_task: need >= 2 classes");
  if (options.shots < 1) throw std::invalid_argument("make_fixture_task: need k >= 1");
  const int reserved = 1 + C * s + options.instruction_len;
  if (options.vocab <= reserved + 4) {
    throw std::invalid_argument("make_fixture_task: vocabulary too small");
  }

  FixtureTask task;
  task.options = options;

  // Vocabulary layout: mask, per-class signal blocks, instruction tokens,
  // then the shared noise pool.
  task.corpus.vocab.tokens.push_back("<mask>");
  for (int i = 1; i < options.vocab; ++i) {
    task.corpus.vocab.tokens.push_back(token_name(i));
  }
  const int mask_token = 0;
  task.class_signal_tokens.resize(C);
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < s; ++i) {
      task.class_signal_tokens[c].push_back(1 + c * s + i);
    }
  }
  const int instruction_start = 1 + C * s;
  for (int i = 0; i < options.instruction_len; ++i) {
    task.instruction.tokens.push_back(instruction_start + i);
  }
  const int noise_start = instruction_start + options.instruction_len;
  const int noise_count = options.vocab - noise_start;

  Rng rng(options.seed);
  auto draw_example = [&](int cls) {
    LabeledExample e;
    e.label = cls;
    e.tokens.reserve(options.seq_len);
    for (int t = 0; t < options.seq_len; ++t) {
      if (rng.uniform01() < options.signal_prob) {
        const auto& signals = task.class_signal_tokens[cls];
        e.tokens.push_back(signals[rng.below(signals.size())]);
      } else {
        e.tokens.push_back(noise_start + static_cast<int>(rng.below(noise_count)));
      }
    }
    return e;
  };

  task.corpus.num_classes = C;
  task.corpus.shots_per_class = options.shots;
  for (int c = 0; c < C; ++c) {
    for (int k = 0; k < options.shots; ++k) {
      task.corpus.train.push_back(draw_example(c));
    }
  }
  for (int c = 0; c < C; ++c) {
    for (int k = 0; k < options.shots; ++k) {
      task.corpus.validation.push_back(draw_example(c));
    }
  }
  task.corpus.check();

  task.model = SimulatedModelSpec::make(
      options.layers, options.width, options.vocab, options.seed + 1,
      options.input_gain, options.hidden_gain, options.prompt_gain);

  std::vector<int> manual_tokens;
  for (int c = 0; c < C; ++c) manual_tokens.push_back(task.class_signal_tokens[c][0]);
  task.manual_verbalizers = single_token_set(manual_tokens);
  task.manual_verbalizers.check(task.corpus.vocab);

  task.prompt_template = PromptTemplate::single_sentence(mask_token);
  return task;
}

FixtureTask make_fixture_task(std::uint64_t seed, int classes, int shots) {
  FixtureOptions options;
  options.seed = seed;
  options.classes = classes;
  options.shots = shots;
  return make_fixture_task(options);
}

}  // namespace boxtune
