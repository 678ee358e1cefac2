#include "boxtune/subspace.hpp"

#include <cmath>
#include <stdexcept>

#include "boxtune/rng.hpp"

namespace boxtune {

double compute_sigma_a(const ScalingParams& params) {
  if (params.alpha <= 0.0 || params.sigma_hat <= 0.0 || params.sigma_z <= 0.0 ||
      params.dim < 1) {
    throw std::invalid_argument(
        "compute_sigma_a: alpha, sigma_hat, sigma_z must be positive and d >= 1");
  }
  return params.alpha * params.sigma_hat /
         (std::sqrt(static_cast<double>(params.dim)) * params.sigma_z);
}

ProjectionMatrix::ProjectionMatrix(int intrinsic_dim, int prompt_dim,
                                   double sigma_a, std::uint64_t seed)
    : sigma_a_(sigma_a), seed_(seed) {
  if (intrinsic_dim < 1) {
    throw std::invalid_argument("ProjectionMatrix: intrinsic dimension must be >= 1");
  }
  if (prompt_dim < intrinsic_dim) {
    throw std::invalid_argument(
        "ProjectionMatrix: prompt dimension must be >= intrinsic dimension");
  }
  if (!(sigma_a > 0.0)) {
    throw std::invalid_argument("ProjectionMatrix: sigma_a must be positive");
  }
  entries_.resize(prompt_dim, intrinsic_dim);
  // Fixed row-major fill order keeps the matrix reproducible for a given seed.
  Rng rng(seed);
  for (int i = 0; i < prompt_dim; ++i) {
    for (int j = 0; j < intrinsic_dim; ++j) {
      entries_(i, j) = sigma_a * rng.normal();
    }
  }
}

ProjectionMatrix::ProjectionMatrix(Eigen::MatrixXd entries, double sigma_a,
                                   std::uint64_t seed)
    : entries_(std::move(entries)), sigma_a_(sigma_a), seed_(seed) {
  if (entries_.rows() < entries_.cols() || entries_.cols() < 1) {
    throw std::invalid_argument("ProjectionMatrix: bad explicit shape");
  }
}

ProjectionMatrix make_projection(int intrinsic_dim, int prompt_dim,
                                 double sigma_a, std::uint64_t seed) {
  return ProjectionMatrix(intrinsic_dim, prompt_dim, sigma_a, seed);
}

PromptVector project(const ProjectionMatrix& pi, const IntrinsicVector& z) {
  if (z.values.size() != pi.intrinsic_dim()) {
    throw std::invalid_argument("project: z length does not match projection columns");
  }
  PromptVector out;
  out.values = pi.entries() * z.values;
  out.layer_index = z.layer_index;
  return out;
}

PromptVector compose_prompt(const PromptVector& p0, const PromptVector& p_theta) {
  if (p0.values.size() != p_theta.values.size()) {
    throw std::invalid_argument("compose_prompt: length mismatch");
  }
  if (p0.layer_index != p_theta.layer_index) {
    throw std::invalid_argument("compose_prompt: layer mismatch");
  }
  PromptVector out;
  out.values = p0.values + p_theta.values;
  out.layer_index = p0.layer_index;
  return out;
}

}  // namespace boxtune
