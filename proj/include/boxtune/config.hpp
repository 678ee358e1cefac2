#pragma once

#include <optional>
#include <string>

#include "boxtune/fixture.hpp"
#include "boxtune/scheduler.hpp"

namespace boxtune {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Toggles {
  bool two_stage = true;
  bool m2_verbalizers = true;
  bool in2_init = true;
};

/// One experiment, fully determined by the file contents plus seed.
struct TaskConfig {
  TwoStageConfig optimizer;
  Toggles toggles;
  FixtureOptions fixture;
  std::optional<std::string> endpoint;  // remote scoring service; in-process when absent
  std::optional<std::string> verbalizer_file;
  std::string output_dir = "runs/out";
  int verbalizer_cap = 3;  // tokens per class in an assembled set
};

/// Loads a JSON config. Budget1/Budget2/Alpha/Sigma1/Sigma2 are required and
/// follow the run-table naming; errors name the offending field.
TaskConfig load_task_config(const std::string& path);
TaskConfig parse_task_config(const std::string& text);

/// Environment overrides: BOXTUNE_ENDPOINT, BOXTUNE_OUTPUT_DIR.
void apply_env_overrides(TaskConfig& config);

std::string task_config_to_json(const TaskConfig& config);

}  // namespace boxtune
