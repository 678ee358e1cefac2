#include "boxtune/cobyla.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxtune {

namespace {
constexpr double kRankTolerance = 1e-10;
constexpr double kFlatGradient = 1e-14;
}  // namespace

Cobyla::Cobyla(const Eigen::VectorXd& x0, double rho_start, double rho_end,
               Objective objective)
    : dim_(static_cast<int>(x0.size())),
      rho_(rho_start),
      rho_end_(rho_end),
      objective_(std::move(objective)) {
  if (dim_ < 1) throw std::invalid_argument("Cobyla: x0 must be non-empty");
  if (!(rho_end > 0.0) || rho_end > rho_start) {
    throw std::invalid_argument("Cobyla: need rho_start >= rho_end > 0");
  }
  if (!objective_) throw std::invalid_argument("Cobyla: objective is empty");

  simplex_.reserve(dim_ + 1);
  simplex_f_.reserve(dim_ + 1);
  const double f0 = evaluate(x0);
  simplex_.push_back(x0);
  simplex_f_.push_back(f0);
  for (int i = 0; i < dim_; ++i) {
    Eigen::VectorXd v = x0;
    v(i) += rho_start;
    const double f = evaluate(v);
    simplex_.push_back(std::move(v));
    simplex_f_.push_back(f);
  }
}

double Cobyla::evaluate(const Eigen::VectorXd& x) {
  ++eval_count_;
  const double f = objective_(x);
  if (best_point_.size() == 0 || f < best_fitness_) {
    best_fitness_ = f;
    best_point_ = x;
  }
  return f;
}

int Cobyla::worst_vertex() const {
  int w = 0;
  for (int i = 1; i <= dim_; ++i) {
    if (simplex_f_[i] > simplex_f_[w]) w = i;
  }
  return w;
}

int Cobyla::best_vertex() const {
  int b = 0;
  for (int i = 1; i <= dim_; ++i) {
    if (simplex_f_[i] < simplex_f_[b]) b = i;
  }
  return b;
}

void Cobyla::step() {
  if (done_) return;

  const int base = best_vertex();
  Eigen::MatrixXd edges(dim_, dim_);
  Eigen::VectorXd rhs(dim_);
  int row = 0;
  for (int i = 0; i <= dim_; ++i) {
    if (i == base) continue;
    edges.row(row) = (simplex_[i] - simplex_[base]).transpose();
    rhs(row) = simplex_f_[i] - simplex_f_[base];
    ++row;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(edges);
  qr.setThreshold(kRankTolerance);
  const int rank = static_cast<int>(qr.rank());

  Eigen::VectorXd probe;
  bool model_step = false;
  if (rank < dim_) {
    // Degenerate simplex: renew one interpolation direction orthogonal to the
    // current edge span, then keep going.
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(edges.transpose())
            .householderQ();
    probe = simplex_[base] + rho_ * q.col(dim_ - 1);
  } else {
    const Eigen::VectorXd gradient = qr.solve(rhs);
    if (gradient.norm() < kFlatGradient) {
      // Flat model: probe coordinate directions in rotation.
      probe = simplex_[base];
      probe(flat_probe_axis_) += rho_;
      flat_probe_axis_ = (flat_probe_axis_ + 1) % dim_;
    } else {
      probe = simplex_[base] - rho_ * gradient.normalized();
      model_step = true;
    }
  }

  const double incumbent = best_fitness_;
  const double f = evaluate(probe);
  const int worst = worst_vertex();
  if (f < incumbent) {
    simplex_[worst] = std::move(probe);
    simplex_f_[worst] = f;
    return;
  }
  // Failed proposal: still use it to refresh the worst vertex when it helps
  // the interpolation set, then contract.
  if (f < simplex_f_[worst] || !model_step) {
    simplex_[worst] = std::move(probe);
    simplex_f_[worst] = f;
  }
  if (rho_ <= rho_end_) {
    done_ = true;
  } else {
    rho_ = std::max(rho_end_, 0.5 * rho_);
  }
}

CobylaResult cobyla_run(const Eigen::VectorXd& x0, double rho_start,
                        double rho_end, std::int64_t budget,
                        const Objective& objective,
                        const std::function<void(const Cobyla&)>& on_step) {
  const std::int64_t init_cost = x0.size() + 1;
  if (budget < init_cost) {
    throw std::invalid_argument("cobyla_run: budget below d+1 initialization cost");
  }
  Cobyla state(x0, rho_start, rho_end, objective);
  if (on_step) on_step(state);
  while (state.evaluations() < budget && !state.done()) {
    state.step();
    if (on_step) on_step(state);
  }
  return {state.best_point(), state.best_fitness(), state.evaluations()};
}

CobylaResult coordinate_search(const Eigen::VectorXd& x0, double step0,
                               double step_end, std::int64_t budget,
                               const Objective& objective) {
  if (budget < 1) throw std::invalid_argument("coordinate_search: budget must be >= 1");
  if (!(step_end > 0.0) || step_end > step0) {
    throw std::invalid_argument("coordinate_search: need step0 >= step_end > 0");
  }
  const int dim = static_cast<int>(x0.size());
  Eigen::VectorXd best = x0;
  double best_f = objective(best);
  std::int64_t evals = 1;
  double step = step0;
  int sweep_improvements = 0;
  int axis = 0;
  int sign = +1;
  while (evals < budget) {
    Eigen::VectorXd probe = best;
    probe(axis) += sign * step;
    const double f = objective(probe);
    ++evals;
    if (f < best_f) {
      best_f = f;
      best = std::move(probe);
      ++sweep_improvements;
    }
    if (sign > 0) {
      sign = -1;
    } else {
      sign = +1;
      axis = (axis + 1) % dim;
      if (axis == 0) {
        if (sweep_improvements == 0) {
          if (step <= step_end) break;
          step = std::max(step_end, 0.5 * step);
        }
        sweep_improvements = 0;
      }
    }
  }
  return {best, best_f, evals};
}

}  // namespace boxtune
