#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

namespace boxtune {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct CobylaResult {
  Eigen::VectorXd best_point;
  double best_fitness = 0.0;
  std::int64_t evals_used = 0;
};

/// Trust-region search over a simplex of d+1 interpolation points.
///
/// Each step fits the linear model through the simplex, evaluates the model
/// minimizer on the sphere of radius rho around the incumbent (exactly one
/// objective call), and either accepts it or contracts rho by half down to
/// rho_end. A degenerate simplex is repaired one vertex per step with a probe
/// along a direction orthogonal to the current edge span. Deterministic,
/// unconstrained; best-so-far fitness never increases.
class Cobyla {
 public:
  Cobyla(const Eigen::VectorXd& x0, double rho_start, double rho_end,
         Objective objective);

  /// One oracle evaluation. No-op once done().
  void step();

  /// True when rho has bottomed out at rho_end and the last proposal failed.
  bool done() const { return done_; }

  const Eigen::VectorXd& best_point() const { return best_point_; }
  double best_fitness() const { return best_fitness_; }
  double rho() const { return rho_; }
  std::int64_t evaluations() const { return eval_count_; }
  int dim() const { return dim_; }

 private:
  double evaluate(const Eigen::VectorXd& x);
  int worst_vertex() const;
  int best_vertex() const;

  int dim_;
  double rho_;
  double rho_end_;
  Objective objective_;
  std::vector<Eigen::VectorXd> simplex_;
  std::vector<double> simplex_f_;
  Eigen::VectorXd best_point_;
  double best_fitness_ = 0.0;
  std::int64_t eval_count_ = 0;
  int flat_probe_axis_ = 0;
  bool done_ = false;
};

/// Runs Cobyla from x0 under a hard evaluation cap (the d+1 initialization
/// calls count). budget must be at least d+1.
CobylaResult cobyla_run(const Eigen::VectorXd& x0, double rho_start,
                        double rho_end, std::int64_t budget,
                        const Objective& objective,
                        const std::function<void(const Cobyla&)>& on_step = {});

/// Cyclic coordinate descent probing one direction per objective call.
/// Usable under any positive budget; used where the per-layer call cap is too
/// small to seed a simplex.
CobylaResult coordinate_search(const Eigen::VectorXd& x0, double step0,
                               double step_end, std::int64_t budget,
                               const Objective& objective);

}  // namespace boxtune
