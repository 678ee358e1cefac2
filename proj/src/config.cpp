#include "boxtune/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace boxtune {

namespace {
using nlohmann::json;

template <typename T>
T require(const json& doc, const std::string& field) {
  if (!doc.contains(field)) {
    throw ConfigError("config: missing required field \"" + field + "\"");
  }
  try {
    return doc.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field \"" + field + "\" has the wrong type");
  }
}

template <typename T>
T optional_or(const json& doc, const std::string& field, T fallback) {
  if (!doc.contains(field) || doc.at(field).is_null()) return fallback;
  try {
    return doc.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field \"" + field + "\" has the wrong type");
  }
}

}  // namespace

TaskConfig parse_task_config(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config: not a JSON object");
  }

  TaskConfig config;
  config.optimizer.budget1 = require<std::int64_t>(doc, "Budget1");
  config.optimizer.budget2 = require<std::int64_t>(doc, "Budget2");
  config.optimizer.alpha = require<double>(doc, "Alpha");
  config.optimizer.sigma1 = require<double>(doc, "Sigma1");
  config.optimizer.sigma2 = require<double>(doc, "Sigma2");
  config.optimizer.popsize = optional_or<int>(doc, "popsize", 20);
  config.optimizer.intrinsic_dim = require<int>(doc, "intrinsic_dim");
  config.optimizer.layers = optional_or<int>(doc, "layers", 3);
  config.optimizer.seed = optional_or<std::uint64_t>(doc, "seed", 42);
  config.optimizer.stage2_split = stage2_split_from_name(
      optional_or<std::string>(doc, "stage2_split", "per_layer_b2_div_L"));

  if (doc.contains("toggles")) {
    const json& t = doc.at("toggles");
    config.toggles.two_stage = optional_or<bool>(t, "two_stage", true);
    config.toggles.m2_verbalizers = optional_or<bool>(t, "m2_verbalizers", true);
    config.toggles.in2_init = optional_or<bool>(t, "in2_init", true);
  }

  if (doc.contains("fixture")) {
    const json& f = doc.at("fixture");
    config.fixture.seed = optional_or<std::uint64_t>(f, "seed", 7);
    config.fixture.classes = optional_or<int>(f, "classes", 2);
    config.fixture.shots = optional_or<int>(f, "shots", 16);
    config.fixture.width = optional_or<int>(f, "width", 128);
    config.fixture.vocab = optional_or<int>(f, "vocab", 96);
    config.fixture.seq_len = optional_or<int>(f, "seq_len", 16);
    config.fixture.signal_tokens_per_class =
        optional_or<int>(f, "signal_tokens_per_class", 4);
    config.fixture.signal_prob = optional_or<double>(f, "signal_prob", 0.85);
  }
  config.fixture.layers = config.optimizer.layers;

  config.endpoint = doc.contains("endpoint") && !doc["endpoint"].is_null()
                        ? std::optional<std::string>(doc["endpoint"].get<std::string>())
                        : std::nullopt;
  config.verbalizer_file =
      doc.contains("verbalizer_file") && !doc["verbalizer_file"].is_null()
          ? std::optional<std::string>(doc["verbalizer_file"].get<std::string>())
          : std::nullopt;
  config.output_dir = optional_or<std::string>(doc, "output_dir", "runs/out");
  config.verbalizer_cap = optional_or<int>(doc, "verbalizer_cap", 3);

  try {
    config.optimizer.check();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (config.verbalizer_cap < 1) {
    throw ConfigError("config: field \"verbalizer_cap\" must be >= 1");
  }
  return config;
}

TaskConfig load_task_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_task_config(buffer.str());
}

void apply_env_overrides(TaskConfig& config) {
  if (const char* endpoint = std::getenv("BOXTUNE_ENDPOINT")) {
    if (*endpoint) config.endpoint = std::string(endpoint);
  }
  if (const char* out = std::getenv("BOXTUNE_OUTPUT_DIR")) {
    if (*out) config.output_dir = std::string(out);
  }
}

std::string task_config_to_json(const TaskConfig& config) {
  json doc;
  doc["Budget1"] = config.optimizer.budget1;
  doc["Budget2"] = config.optimizer.budget2;
  doc["Alpha"] = config.optimizer.alpha;
  doc["Sigma1"] = config.optimizer.sigma1;
  doc["Sigma2"] = config.optimizer.sigma2;
  doc["popsize"] = config.optimizer.popsize;
  doc["intrinsic_dim"] = config.optimizer.intrinsic_dim;
  doc["layers"] = config.optimizer.layers;
  doc["seed"] = config.optimizer.seed;
  doc["stage2_split"] = stage2_split_name(config.optimizer.stage2_split);
  doc["toggles"] = {{"two_stage", config.toggles.two_stage},
                    {"m2_verbalizers", config.toggles.m2_verbalizers},
                    {"in2_init", config.toggles.in2_init}};
  doc["fixture"] = {{"seed", config.fixture.seed},
                    {"classes", config.fixture.classes},
                    {"shots", config.fixture.shots},
                    {"width", config.fixture.width},
                    {"vocab", config.fixture.vocab},
                    {"seq_len", config.fixture.seq_len},
                    {"signal_tokens_per_class", config.fixture.signal_tokens_per_class},
                    {"signal_prob", config.fixture.signal_prob}};
  if (config.endpoint) doc["endpoint"] = *config.endpoint;
  if (config.verbalizer_file) doc["verbalizer_file"] = *config.verbalizer_file;
  doc["output_dir"] = config.output_dir;
  doc["verbalizer_cap"] = config.verbalizer_cap;
  return doc.dump(2);
}

}  // namespace boxtune
