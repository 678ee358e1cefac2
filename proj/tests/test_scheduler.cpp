#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boxtune/scheduler.hpp"

using namespace boxtune;

namespace {

/// Synthetic separable task: loss is a quadratic in the stacked z with a
/// per-layer shift. Counts its own oracle calls and can be rigged to fail.
class QuadraticTask : public TunableTask {
 public:
  QuadraticTask(int layers, int dim, int fail_after = -1)
      : layers_(layers), dim_(dim), fail_after_(fail_after) {}

  int layers() const override { return layers_; }
  int intrinsic_dim() const override { return dim_; }

  double evaluate_train(const std::vector<Eigen::VectorXd>& zs) override {
    if (fail_after_ >= 0 && calls_ >= fail_after_) {
      throw std::runtime_error("rigged oracle failure");
    }
    ++calls_;
    seen_.push_back(zs);
    return loss(zs);
  }

  ValMetrics probe_validation(const std::vector<Eigen::VectorXd>& zs) override {
    return {loss(zs) + 0.1, 0.5};
  }
  ValMetrics probe_train(const std::vector<Eigen::VectorXd>& zs) override {
    return {loss(zs), 1.0};
  }
  std::int64_t oracle_calls() const override { return calls_; }

  const std::vector<std::vector<Eigen::VectorXd>>& seen() const { return seen_; }

 private:
  double loss(const std::vector<Eigen::VectorXd>& zs) const {
    double total = 0.0;
    for (int l = 0; l < layers_; ++l) {
      total += (zs[l].array() - (l + 1)).square().sum();
    }
    return total;
  }

  int layers_, dim_;
  int fail_after_;
  std::int64_t calls_ = 0;
  std::vector<std::vector<Eigen::VectorXd>> seen_;
};

TwoStageConfig small_config(int layers, int dim) {
  TwoStageConfig cfg;
  cfg.budget1 = 0;
  cfg.budget2 = 0;
  cfg.popsize = 4;
  cfg.intrinsic_dim = dim;
  cfg.layers = layers;
  cfg.alpha = 0.5;
  cfg.sigma1 = 0.5;
  cfg.sigma2 = 0.3;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("zero stage-one budget leaves the vectors untouched") {
  QuadraticTask task(2, 3);
  TwoStageConfig cfg = small_config(2, 3);
  RunRecord record;
  std::vector<Eigen::VectorXd> z0(2, Eigen::VectorXd::Ones(3));
  const auto out = run_stage1(cfg, task, z0, record);
  CHECK(task.oracle_calls() == 0);
  CHECK(record.calls.empty());
  for (const auto& z : out) CHECK((z - Eigen::VectorXd::Ones(3)).norm() == 0.0);
}

TEST_CASE("stage one consumes whole generations up to the budget") {
  QuadraticTask task(1, 3);
  TwoStageConfig cfg = small_config(1, 3);
  cfg.budget1 = 40;  // exactly 10 generations of 4
  RunRecord record;
  run_stage1(cfg, task, {Eigen::VectorXd::Zero(3)}, record);
  CHECK(task.oracle_calls() == 40);
  CHECK(record.stage1_calls == 40);
  CHECK(record.calls.size() == 40);
  CHECK(record.val_curve.size() == 10);  // one probe per generation

  QuadraticTask ragged(1, 3);
  cfg.budget1 = 42;  // not divisible by popsize: last partial generation skipped
  RunRecord record2;
  run_stage1(cfg, ragged, {Eigen::VectorXd::Zero(3)}, record2);
  CHECK(ragged.oracle_calls() == 40);
}

TEST_CASE("layers update round-robin") {
  QuadraticTask task(3, 2);
  TwoStageConfig cfg = small_config(3, 2);
  cfg.budget1 = 3 * 4 * 2;  // two full sweeps
  RunRecord record;
  run_stage1(cfg, task, std::vector<Eigen::VectorXd>(3, Eigen::VectorXd::Zero(2)),
             record);
  REQUIRE(record.calls.size() == 24);
  for (std::size_t i = 0; i < record.calls.size(); ++i) {
    const int expected_layer = static_cast<int>((i / 4) % 3);
    CHECK(record.calls[i].layer == expected_layer);
    CHECK(record.calls[i].stage == 1);
    CHECK(record.calls[i].call == static_cast<std::int64_t>(i) + 1);
  }
}

TEST_CASE("candidate evaluations freeze other layers at their working vectors") {
  QuadraticTask task(2, 2);
  TwoStageConfig cfg = small_config(2, 2);
  cfg.budget1 = 8;  // one generation per layer
  RunRecord record;
  run_stage1(cfg, task, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Zero(2)),
             record);
  const auto& seen = task.seen();
  REQUIRE(seen.size() == 8);
  // during layer 0's generation, layer 1 stays at zero
  for (int i = 0; i < 4; ++i) CHECK(seen[i][1].norm() == 0.0);
  // during layer 1's generation, layer 0 is frozen at one fixed vector
  for (int i = 5; i < 8; ++i) CHECK((seen[i][0] - seen[4][0]).norm() == 0.0);
}

TEST_CASE("stage two splits the budget per layer and caps calls") {
  TwoStageConfig cfg = small_config(2, 2);
  cfg.budget2 = 20;
  cfg.stage2_split = Stage2Split::kPerLayerBudgetOverLayers;

  QuadraticTask task(2, 2);
  RunRecord record;
  std::vector<Eigen::VectorXd> z1(2, Eigen::VectorXd::Zero(2));
  run_stage2(cfg, task, z1, record);
  CHECK(record.stage2_calls <= 20);
  CHECK(task.oracle_calls() == record.stage2_calls);
  CHECK(!record.stage2_fallback);  // cap 10 >= d+1 = 3

  // literal b2/d split: cap 20/2 = 10 per layer
  QuadraticTask task2(2, 2);
  cfg.stage2_split = Stage2Split::kPerLayerBudgetOverDim;
  RunRecord record2;
  run_stage2(cfg, task2, z1, record2);
  CHECK(record2.stage2_calls <= 20);

  // everything on the input layer
  QuadraticTask task3(2, 2);
  cfg.stage2_split = Stage2Split::kAllOnInputLayer;
  RunRecord record3;
  run_stage2(cfg, task3, z1, record3);
  for (const CallLogRow& row : record3.calls) CHECK(row.layer == 0);
}

TEST_CASE("tiny per-layer caps fall back to coordinate search") {
  TwoStageConfig cfg = small_config(1, 10);
  cfg.budget2 = 6;  // cap 6 < d+1 = 11
  QuadraticTask task(1, 10);
  RunRecord record;
  run_stage2(cfg, task, {Eigen::VectorXd::Zero(10)}, record);
  CHECK(record.stage2_fallback);
  CHECK(record.stage2_calls <= 6);
  CHECK(record.stage2_calls > 0);
}

TEST_CASE("stage two starts each layer from the incoming best") {
  TwoStageConfig cfg = small_config(2, 2);
  cfg.budget2 = 12;
  QuadraticTask task(2, 2);
  RunRecord record;
  std::vector<Eigen::VectorXd> z1 = {Eigen::VectorXd::Constant(2, 0.9),
                                     Eigen::VectorXd::Constant(2, 2.1)};
  run_stage2(cfg, task, z1, record);
  REQUIRE(!task.seen().empty());
  CHECK((task.seen()[0][0] - Eigen::VectorXd::Constant(2, 0.9)).norm() == 0.0);
  CHECK((task.seen()[0][1] - Eigen::VectorXd::Constant(2, 2.1)).norm() == 0.0);
}

TEST_CASE("full runs respect the total budget and reconcile counters") {
  for (auto [b1, b2] : {std::pair<int, int>{40, 20}, {40, 0}, {0, 20}, {0, 0}}) {
    QuadraticTask task(2, 3);
    TwoStageConfig cfg = small_config(2, 3);
    cfg.budget1 = b1;
    cfg.budget2 = b2;
    const RunRecord record = run_two_stage(cfg, task);
    CHECK(!record.aborted);
    CHECK(static_cast<std::int64_t>(record.calls.size()) <= b1 + b2);
    CHECK(static_cast<std::int64_t>(record.calls.size()) ==
          task.oracle_calls());
    CHECK(record.stage1_calls + record.stage2_calls ==
          static_cast<std::int64_t>(record.calls.size()));
    if (b2 == 0) CHECK(record.stage2_calls == 0);
    CHECK(record.final_z.size() == 2);
    CHECK(record.best_z.size() == 2);
  }
}

TEST_CASE("best-so-far training loss is non-increasing and stage two improves") {
  QuadraticTask task(2, 3);
  TwoStageConfig cfg = small_config(2, 3);
  cfg.budget1 = 80;
  cfg.budget2 = 40;
  const RunRecord record = run_two_stage(cfg, task);
  double best = std::numeric_limits<double>::infinity();
  for (const CallLogRow& row : record.calls) {
    best = std::min(best, row.train_loss);
  }
  CHECK(record.best_train_loss_so_far() == best);
  CHECK(record.final_train_loss <= record.calls.front().train_loss);
}

TEST_CASE("oracle failures abort with the partial record") {
  QuadraticTask task(1, 3, /*fail_after=*/10);
  TwoStageConfig cfg = small_config(1, 3);
  cfg.budget1 = 40;
  const RunRecord record = run_two_stage(cfg, task);
  CHECK(record.aborted);
  CHECK(record.abort_reason == "rigged oracle failure");
  CHECK(record.calls.size() == 10);
}

TEST_CASE("identical config and task give bitwise-identical CSV logs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "boxtune_sched_test";
  fs::create_directories(dir);

  auto run_once = [&](const std::string& name) {
    QuadraticTask task(2, 3);
    TwoStageConfig cfg = small_config(2, 3);
    cfg.budget1 = 40;
    cfg.budget2 = 20;
    const RunRecord record = run_two_stage(cfg, task);
    write_run_csv(record, (dir / name).string());
    write_val_csv(record, (dir / ("val_" + name)).string());
  };
  run_once("a.csv");
  run_once("b.csv");

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "val_a.csv") == slurp(dir / "val_b.csv"));
  CHECK(!slurp(dir / "a.csv").empty());
  fs::remove_all(dir);
}

TEST_CASE("config validation") {
  TwoStageConfig cfg = small_config(1, 2);
  cfg.budget1 = -1;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = small_config(1, 2);
  cfg.popsize = 1;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = small_config(1, 2);
  cfg.intrinsic_dim = 0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
  cfg = small_config(1, 2);
  cfg.layers = 0;
  CHECK_THROWS_AS(cfg.check(), std::invalid_argument);

  CHECK(stage2_split_from_name("per_layer_b2_div_d") ==
        Stage2Split::kPerLayerBudgetOverDim);
  CHECK_THROWS_AS(stage2_split_from_name("bogus"), std::invalid_argument);
}
