#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace boxtune {

/// Inputs of the projection scaling rule sigma_A = alpha * sigma_hat / (sqrt(d) * sigma_z).
struct ScalingParams {
  double alpha = 0.0;      ///< stretch factor for the projection distribution
  double sigma_hat = 0.0;  ///< std of the black-box model's word embeddings
  double sigma_z = 0.0;    ///< std of the search distribution over z
  int dim = 0;             ///< intrinsic dimension d
};

double compute_sigma_a(const ScalingParams& params);

/// Low-dimensional tunable variable z, one per model layer.
struct IntrinsicVector {
  Eigen::VectorXd values;
  int layer_index = 0;
};

/// Prompt-space vector of length D, tied to one model layer.
struct PromptVector {
  Eigen::VectorXd values;
  int layer_index = 0;
};

/// Frozen random map from intrinsic space R^d to prompt space R^D.
/// Entries are i.i.d. N(0, sigma_a^2) and immutable after construction;
/// the same (d, D, sigma_a, seed) reproduces the matrix bit-for-bit.
class ProjectionMatrix {
 public:
  ProjectionMatrix(int intrinsic_dim, int prompt_dim, double sigma_a,
                   std::uint64_t seed);
  /// Wraps explicitly given entries (hand-built cases).
  ProjectionMatrix(Eigen::MatrixXd entries, double sigma_a, std::uint64_t seed);

  const Eigen::MatrixXd& entries() const { return entries_; }
  double sigma_a() const { return sigma_a_; }
  std::uint64_t seed() const { return seed_; }
  int intrinsic_dim() const { return static_cast<int>(entries_.cols()); }
  int prompt_dim() const { return static_cast<int>(entries_.rows()); }

 private:
  Eigen::MatrixXd entries_;  // D x d
  double sigma_a_;
  std::uint64_t seed_;
};

ProjectionMatrix make_projection(int intrinsic_dim, int prompt_dim,
                                 double sigma_a, std::uint64_t seed);

/// p_theta = Pi * z.
PromptVector project(const ProjectionMatrix& pi, const IntrinsicVector& z);

/// p = p0 + p_theta. Lengths and layer indices must match.
PromptVector compose_prompt(const PromptVector& p0, const PromptVector& p_theta);

}  // namespace boxtune
