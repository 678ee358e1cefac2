#include "boxtune/cmaes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace boxtune {

namespace {
constexpr double kEigenvalueFloor = 1e-20;
}

int cma_default_popsize(int dim) {
  if (dim < 1) throw std::invalid_argument("cma_default_popsize: dim must be >= 1");
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

CmaEs::CmaEs(int dim, const Eigen::VectorXd& mean0, double sigma0, int popsize,
             std::uint64_t seed)
    : dim_(dim), lambda_(popsize), rng_(seed) {
  if (dim < 1) throw std::invalid_argument("CmaEs: dim must be >= 1");
  if (mean0.size() != dim) throw std::invalid_argument("CmaEs: mean0 has wrong length");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("CmaEs: sigma0 must be positive");
  if (popsize < 2) throw std::invalid_argument("CmaEs: popsize must be >= 2");

  mu_ = lambda_ / 2;
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i) {
    weights_(i) = std::log(mu_ + 0.5) - std::log(static_cast<double>(i + 1));
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  const double n = static_cast<double>(dim_);
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
             c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                   ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  mean_ = mean0;
  sigma_ = sigma0;
  cov_ = Eigen::MatrixXd::Identity(dim_, dim_);
  path_sigma_ = Eigen::VectorXd::Zero(dim_);
  path_c_ = Eigen::VectorXd::Zero(dim_);
  update_eigensystem();
}

void CmaEs::update_eigensystem() {
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("CmaEs: covariance eigendecomposition failed");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  bool floored = false;
  for (int i = 0; i < dim_; ++i) {
    if (values(i) < kEigenvalueFloor) {
      values(i) = kEigenvalueFloor;
      floored = true;
    }
  }
  basis_ = solver.eigenvectors();
  if (floored) {
    cov_ = basis_ * values.asDiagonal() * basis_.transpose();
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  }
  scales_ = values.cwiseSqrt();
  inv_sqrt_cov_ = basis_ * scales_.cwiseInverse().asDiagonal() * basis_.transpose();
}

std::vector<Candidate> CmaEs::ask() {
  std::vector<Candidate> out;
  out.reserve(lambda_);
  for (int i = 0; i < lambda_; ++i) {
    Eigen::VectorXd raw(dim_);
    for (int j = 0; j < dim_; ++j) raw(j) = rng_.normal();
    Candidate c;
    c.point = mean_ + sigma_ * (basis_ * (scales_.asDiagonal() * raw));
    out.push_back(std::move(c));
  }
  return out;
}

void CmaEs::tell(const std::vector<Candidate>& evaluated) {
  if (static_cast<int>(evaluated.size()) != lambda_) {
    throw std::invalid_argument("CmaEs::tell: expected exactly popsize candidates");
  }
  for (const Candidate& c : evaluated) {
    if (!c.fitness.has_value()) {
      throw std::invalid_argument("CmaEs::tell: candidate without fitness");
    }
    if (c.point.size() != dim_) {
      throw std::invalid_argument("CmaEs::tell: candidate has wrong dimension");
    }
  }

  // Best-ever bookkeeping in evaluation order; strict improvement keeps the
  // earliest candidate on ties.
  double fitness_sum = 0.0;
  for (const Candidate& c : evaluated) {
    fitness_sum += *c.fitness;
    if (!best_.fitness.has_value() || *c.fitness < *best_.fitness) {
      best_ = c;
    }
  }
  last_mean_fitness_ = fitness_sum / lambda_;
  evaluations_ += lambda_;

  // Rank-based selection: order by fitness, index as tiebreak.
  std::vector<int> order(lambda_);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = *evaluated[a].fitness;
    const double fb = *evaluated[b].fitness;
    if (fa != fb) return fa < fb;
    return a < b;
  });

  const Eigen::VectorXd old_mean = mean_;
  Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < mu_; ++i) {
    new_mean += weights_(i) * evaluated[order[i]].point;
  }

  const Eigen::VectorXd mean_shift = (new_mean - old_mean) / sigma_;

  path_sigma_ = (1.0 - c_sigma_) * path_sigma_ +
                std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) *
                    (inv_sqrt_cov_ * mean_shift);

  const double expected_decay =
      std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * (generation_ + 1)));
  const bool h_sigma = path_sigma_.norm() / expected_decay <
                       (1.4 + 2.0 / (dim_ + 1.0)) * chi_n_;

  path_c_ = (1.0 - c_c_) * path_c_;
  if (h_sigma) {
    path_c_ += std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * mean_shift;
  }

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < mu_; ++i) {
    const Eigen::VectorXd y = (evaluated[order[i]].point - old_mean) / sigma_;
    rank_mu.noalias() += weights_(i) * (y * y.transpose());
  }

  const double stall_correction = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
  cov_ = (1.0 - c_1_ - c_mu_) * cov_ +
         c_1_ * (path_c_ * path_c_.transpose() + stall_correction * cov_) +
         c_mu_ * rank_mu;

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (path_sigma_.norm() / chi_n_ - 1.0));

  mean_ = new_mean;
  ++generation_;
  update_eigensystem();
}

const Candidate& CmaEs::best() const {
  if (!best_.fitness.has_value()) {
    throw std::logic_error("CmaEs::best: no evaluations told yet");
  }
  return best_;
}

}  // namespace boxtune
