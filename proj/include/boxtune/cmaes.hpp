#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "boxtune/rng.hpp"

namespace boxtune {

/// One search point together with its (possibly pending) fitness.
struct Candidate {
  Eigen::VectorXd point;
  std::optional<double> fitness;
};

/// Standard population size 4 + floor(3 ln d).
int cma_default_popsize(int dim);

/// Covariance Matrix Adaptation Evolution Strategy with an ask/tell interface.
///
/// The sampling distribution is N(m, delta^2 C). tell() performs weighted
/// recombination of the mu = lambda/2 best candidates, cumulative step-size
/// adaptation, and the rank-1 + rank-mu covariance update with the usual
/// default constants. Lower fitness is better. The full trajectory is
/// deterministic for a fixed seed and fitness function.
class CmaEs {
 public:
  CmaEs(int dim, const Eigen::VectorXd& mean0, double sigma0, int popsize,
        std::uint64_t seed);

  /// Draws popsize fresh candidates from N(m, delta^2 C).
  std::vector<Candidate> ask();

  /// Consumes one fully evaluated generation and updates m, delta, C.
  void tell(const std::vector<Candidate>& evaluated);

  /// Lowest-fitness candidate ever told; ties keep the earliest evaluation.
  const Candidate& best() const;
  bool has_best() const { return best_.fitness.has_value(); }

  const Eigen::VectorXd& mean() const { return mean_; }
  double step_size() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  int generation() const { return generation_; }
  int popsize() const { return lambda_; }
  int dim() const { return dim_; }
  std::int64_t evaluations() const { return evaluations_; }
  /// Mean fitness of the last told generation (for logging).
  double last_mean_fitness() const { return last_mean_fitness_; }

 private:
  void update_eigensystem();

  int dim_;
  int lambda_;
  int mu_;
  Eigen::VectorXd weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_;
  double chi_n_;

  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd cov_;
  Eigen::VectorXd path_sigma_, path_c_;
  int generation_ = 0;
  std::int64_t evaluations_ = 0;

  // eigen factorization of cov_: cov_ = basis_ * diag(scales_^2) * basis_^T
  Eigen::MatrixXd basis_;
  Eigen::VectorXd scales_;
  Eigen::MatrixXd inv_sqrt_cov_;

  Candidate best_;
  double last_mean_fitness_ = 0.0;
  Rng rng_;
};

}  // namespace boxtune
