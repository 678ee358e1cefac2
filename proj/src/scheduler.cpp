#include "boxtune/scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "boxtune/cmaes.hpp"
#include "boxtune/cobyla.hpp"

namespace boxtune {

const char* stage2_split_name(Stage2Split split) {
  switch (split) {
    case Stage2Split::kPerLayerBudgetOverDim: return "per_layer_b2_div_d";
    case Stage2Split::kPerLayerBudgetOverLayers: return "per_layer_b2_div_L";
    case Stage2Split::kAllOnInputLayer: return "all_on_input_layer";
  }
  return "unknown";
}

Stage2Split stage2_split_from_name(const std::string& name) {
  if (name == "per_layer_b2_div_d") return Stage2Split::kPerLayerBudgetOverDim;
  if (name == "per_layer_b2_div_L") return Stage2Split::kPerLayerBudgetOverLayers;
  if (name == "all_on_input_layer") return Stage2Split::kAllOnInputLayer;
  throw std::invalid_argument("unknown stage2_split: " + name);
}

void TwoStageConfig::check() const {
  if (budget1 < 0 || budget2 < 0) {
    throw std::invalid_argument("TwoStageConfig: budgets must be >= 0");
  }
  if (popsize < 2) throw std::invalid_argument("TwoStageConfig: popsize must be >= 2");
  if (intrinsic_dim < 1) {
    throw std::invalid_argument("TwoStageConfig: intrinsic_dim must be >= 1");
  }
  if (layers < 1) throw std::invalid_argument("TwoStageConfig: layers must be >= 1");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("TwoStageConfig: sigma1/sigma2 must be positive");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("TwoStageConfig: alpha must be positive");
}

double RunRecord::best_train_loss_so_far() const {
  double best = std::numeric_limits<double>::infinity();
  for (const CallLogRow& row : calls) best = std::min(best, row.train_loss);
  return best;
}

namespace {

std::uint64_t layer_seed(std::uint64_t base, int layer) {
  return base + 7919ULL * static_cast<std::uint64_t>(layer + 1);
}

void probe_and_snapshot(TunableTask& task, const std::vector<Eigen::VectorXd>& zs,
                        int stage, RunRecord& record) {
  const ValMetrics m = task.probe_validation(zs);
  ValCurvePoint point;
  point.call = static_cast<std::int64_t>(record.calls.size());
  point.stage = stage;
  point.val_loss = m.loss;
  point.val_acc = m.acc;
  record.val_curve.push_back(point);
  if (record.best_z.empty() || m.loss < record.best_val_loss) {
    record.best_val_loss = m.loss;
    record.best_val_acc = m.acc;
    record.best_z = zs;
  }
}

}  // namespace

std::vector<Eigen::VectorXd> run_stage1(const TwoStageConfig& config,
                                        TunableTask& task,
                                        std::vector<Eigen::VectorXd> z0,
                                        RunRecord& record) {
  config.check();
  const int L = config.layers;
  const int d = config.intrinsic_dim;
  if (static_cast<int>(z0.size()) != L) {
    throw std::invalid_argument("run_stage1: z0 must have one vector per layer");
  }

  std::vector<Eigen::VectorXd> zs = std::move(z0);
  if (config.budget1 < config.popsize) {
    record.stage1_calls = 0;
    return zs;
  }

  std::vector<CmaEs> states;
  states.reserve(L);
  for (int l = 0; l < L; ++l) {
    const double sigma0 = (l == 0) ? config.sigma1 : config.sigma2;
    states.emplace_back(d, zs[l], sigma0, config.popsize,
                        layer_seed(config.seed, l));
  }

  std::int64_t used = 0;
  int layer = 0;
  while (used + config.popsize <= config.budget1) {
    CmaEs& es = states[layer];
    std::vector<Candidate> candidates = es.ask();
    for (Candidate& c : candidates) {
      std::vector<Eigen::VectorXd> trial = zs;
      trial[layer] = c.point;
      const double loss = task.evaluate_train(trial);
      c.fitness = loss;
      ++used;
      record.calls.push_back({static_cast<std::int64_t>(record.calls.size()) + 1,
                              1, layer, loss});
    }
    es.tell(candidates);
    // Take the generation's argmin as the layer's working vector.
    int best_i = 0;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
      if (*candidates[i].fitness < *candidates[best_i].fitness) best_i = i;
    }
    zs[layer] = candidates[best_i].point;
    probe_and_snapshot(task, zs, 1, record);
    layer = (layer + 1) % L;
  }
  record.stage1_calls = used;
  return zs;
}

std::vector<Eigen::VectorXd> run_stage2(const TwoStageConfig& config,
                                        TunableTask& task,
                                        std::vector<Eigen::VectorXd> z1,
                                        RunRecord& record) {
  config.check();
  const int L = config.layers;
  const int d = config.intrinsic_dim;
  if (static_cast<int>(z1.size()) != L) {
    throw std::invalid_argument("run_stage2: z1 must have one vector per layer");
  }

  std::vector<Eigen::VectorXd> zs = std::move(z1);
  std::int64_t per_layer_cap = 0;
  switch (config.stage2_split) {
    case Stage2Split::kPerLayerBudgetOverDim:
      per_layer_cap = config.budget2 / d;
      break;
    case Stage2Split::kPerLayerBudgetOverLayers:
      per_layer_cap = config.budget2 / L;
      break;
    case Stage2Split::kAllOnInputLayer:
      per_layer_cap = config.budget2;
      break;
  }

  std::int64_t used = 0;
  for (int layer = 0; layer < L; ++layer) {
    const std::int64_t cap =
        (config.stage2_split == Stage2Split::kAllOnInputLayer && layer != 0)
            ? 0
            : per_layer_cap;
    if (cap < 1) continue;

    // Objective over this layer's intrinsic vector; tracks its own incumbent
    // so every oracle call is followed by a probe of the working solution.
    double incumbent_loss = std::numeric_limits<double>::infinity();
    auto objective = [&](const Eigen::VectorXd& z) {
      std::vector<Eigen::VectorXd> trial = zs;
      trial[layer] = z;
      const double loss = task.evaluate_train(trial);
      ++used;
      record.calls.push_back({static_cast<std::int64_t>(record.calls.size()) + 1,
                              2, layer, loss});
      if (loss < incumbent_loss) {
        incumbent_loss = loss;
        zs[layer] = z;
      }
      probe_and_snapshot(task, zs, 2, record);
      return loss;
    };

    // The objective rewrites zs[layer] as its incumbent improves, so the
    // optimizer must start from a detached copy.
    const Eigen::VectorXd start = zs[layer];
    CobylaResult result;
    if (cap < d + 1) {
      record.stage2_fallback = true;
      result = coordinate_search(start, config.sigma2, config.rho_end, cap,
                                 objective);
    } else {
      result = cobyla_run(start, config.sigma2, config.rho_end, cap, objective);
    }
    zs[layer] = result.best_point;
  }
  record.stage2_calls = used;
  return zs;
}

RunRecord run_two_stage(const TwoStageConfig& config, TunableTask& task) {
  config.check();
  if (task.layers() != config.layers ||
      task.intrinsic_dim() != config.intrinsic_dim) {
    throw std::invalid_argument("run_two_stage: task shape does not match config");
  }
  RunRecord record;
  record.seed = config.seed;

  std::vector<Eigen::VectorXd> zs(
      config.layers, Eigen::VectorXd::Zero(config.intrinsic_dim));
  try {
    probe_and_snapshot(task, zs, 0, record);
    zs = run_stage1(config, task, std::move(zs), record);
    if (config.budget2 > 0) {
      zs = run_stage2(config, task, std::move(zs), record);
    }
    record.final_z = zs;
    const ValMetrics train = task.probe_train(zs);
    record.final_train_loss = train.loss;
    record.final_train_acc = train.acc;
  } catch (const std::exception& e) {
    record.aborted = true;
    record.abort_reason = e.what();
    record.final_z = zs;
  }
  if (record.best_z.empty()) record.best_z = record.final_z;
  return record;
}

namespace {

void write_csv_rows(const std::string& path, const std::string& header,
                    const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << header << "\n";
  for (const std::string& row : rows) out << row << "\n";
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_run_csv(const RunRecord& record, const std::string& path) {
  std::vector<std::string> rows;
  rows.reserve(record.calls.size());
  for (const CallLogRow& r : record.calls) {
    rows.push_back(std::to_string(r.call) + "," + std::to_string(r.stage) + "," +
                   std::to_string(r.layer) + "," + format_real(r.train_loss));
  }
  write_csv_rows(path, "call,stage,layer,train_loss", rows);
}

void write_val_csv(const RunRecord& record, const std::string& path) {
  std::vector<std::string> rows;
  rows.reserve(record.val_curve.size());
  for (const ValCurvePoint& p : record.val_curve) {
    rows.push_back(std::to_string(p.call) + "," + std::to_string(p.stage) + "," +
                   format_real(p.val_loss) + "," + format_real(p.val_acc));
  }
  write_csv_rows(path, "call,stage,val_loss,val_acc", rows);
}

}  // namespace boxtune
