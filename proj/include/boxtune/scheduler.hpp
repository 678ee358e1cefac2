#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace boxtune {

/// How the stage-II budget is divided across layers.
enum class Stage2Split {
  kPerLayerBudgetOverDim,     // b2 / d calls per layer (literal reading)
  kPerLayerBudgetOverLayers,  // b2 / L calls per layer (even split)
  kAllOnInputLayer,           // the whole of b2 on layer 0
};

const char* stage2_split_name(Stage2Split split);
Stage2Split stage2_split_from_name(const std::string& name);

struct TwoStageConfig {
  std::int64_t budget1 = 0;  // b1, oracle calls for the evolutionary stage
  std::int64_t budget2 = 0;  // b2, oracle calls for the search stage
  int popsize = 20;          // lambda
  int intrinsic_dim = 0;     // d
  double alpha = 0.5;
  double sigma1 = 1.0;  // initial step size, input layer
  double sigma2 = 0.2;  // initial step size, deeper layers; also stage-II radius
  int layers = 1;       // L
  std::uint64_t seed = 42;
  Stage2Split stage2_split = Stage2Split::kPerLayerBudgetOverLayers;
  double rho_end = 1e-6;

  void check() const;
};

struct ValMetrics {
  double loss = 0.0;
  double acc = 0.0;
};

/// The scheduler's view of a tunable black box: one counted training-batch
/// evaluation per candidate, plus uncounted metric probes for bookkeeping.
class TunableTask {
 public:
  virtual ~TunableTask() = default;
  virtual int layers() const = 0;
  virtual int intrinsic_dim() const = 0;
  /// Training loss of the per-layer intrinsic vectors; consumes one oracle call.
  virtual double evaluate_train(const std::vector<Eigen::VectorXd>& zs) = 0;
  virtual ValMetrics probe_validation(const std::vector<Eigen::VectorXd>& zs) = 0;
  virtual ValMetrics probe_train(const std::vector<Eigen::VectorXd>& zs) = 0;
  /// Counted calls so far, for budget reconciliation.
  virtual std::int64_t oracle_calls() const = 0;
};

struct CallLogRow {
  std::int64_t call = 0;  // 1-based oracle-call index
  int stage = 0;          // 1 or 2
  int layer = 0;
  double train_loss = 0.0;
};

struct ValCurvePoint {
  std::int64_t call = 0;  // oracle-call index at probe time
  int stage = 0;          // 0 marks the pre-optimization probe
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct RunRecord {
  std::vector<CallLogRow> calls;
  std::vector<ValCurvePoint> val_curve;
  std::vector<Eigen::VectorXd> final_z;  // last iterate per layer
  std::vector<Eigen::VectorXd> best_z;   // best-validation snapshot per layer
  double best_val_loss = 0.0;
  double best_val_acc = 0.0;
  double final_train_loss = 0.0;
  double final_train_acc = 0.0;
  std::int64_t stage1_calls = 0;
  std::int64_t stage2_calls = 0;
  bool stage2_fallback = false;  // stage II ran in coordinate-search mode
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;

  double best_train_loss_so_far() const;
};

/// Stage I: round-robin over layers, one CMA-ES generation per visit, other
/// layers frozen at their current working vectors. Per-layer CMA-ES state
/// persists across visits. Stops before any generation that would exceed
/// budget1. Appends rows and validation probes to the record.
std::vector<Eigen::VectorXd> run_stage1(const TwoStageConfig& config,
                                        TunableTask& task,
                                        std::vector<Eigen::VectorXd> z0,
                                        RunRecord& record);

/// Stage II: per layer in order, trust-region search from the stage-I result
/// under the per-layer cap given by stage2_split. Falls back to coordinate
/// line search when the cap cannot seed a d+1 simplex.
std::vector<Eigen::VectorXd> run_stage2(const TwoStageConfig& config,
                                        TunableTask& task,
                                        std::vector<Eigen::VectorXd> z1,
                                        RunRecord& record);

/// Full two-stage run from zero intrinsic vectors. The returned record's
/// best_z holds the snapshot with the lowest validation loss seen at probe
/// boundaries; final metrics are uncounted re-evaluations. Oracle failures
/// abort and return the partial record with aborted set.
RunRecord run_two_stage(const TwoStageConfig& config, TunableTask& task);

/// Writes "call,stage,layer,train_loss" rows (%.17g for reals).
void write_run_csv(const RunRecord& record, const std::string& path);
/// Writes "call,stage,val_loss,val_acc" probe rows.
void write_val_csv(const RunRecord& record, const std::string& path);

}  // namespace boxtune
