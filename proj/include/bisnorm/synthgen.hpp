#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "bisnorm/confusion_matrix.hpp"
#include "bisnorm/geometry.hpp"

namespace bisnorm {

// Random streams. Every generator below draws from Rng(seed, <stream>), so
// two operations sharing a seed never share random numbers.
namespace streams {
inline constexpr std::uint64_t kClassCounts = 1;
inline constexpr std::uint64_t kKernel = 2;
inline constexpr std::uint64_t kConfusion = 3;
inline constexpr std::uint64_t kEmbeddings = 4;
inline constexpr std::uint64_t kBias = 5;
inline constexpr std::uint64_t kCentroids = 6;
}  // namespace streams

struct HeterogeneityConfig {
  double alpha = 1.0;
  int classes = 10;
  int base_per_class = 100;
  double floor_fraction = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

// Row-stochastic matrix: S(i, j) is the probability that a class-i sample is
// predicted as j.
struct SimilarityKernel {
  Eigen::MatrixXd s;

  static SimilarityKernel identity(int classes);
};

struct EmbeddingSpec {
  Eigen::MatrixXd centroids;  // C x n
  double spread = 1.0;
  std::vector<std::int64_t> counts;
  std::uint64_t seed = 0;
};

// Each class keeps floor(floor_fraction * base) samples; the rest of the
// C * base budget is spread multinomially with Dirichlet(alpha) proportions.
std::vector<std::int64_t> sample_class_counts(const HeterogeneityConfig& cfg);

// Symmetric confusion structure: each listed pair shares
// strength / (2 * max partner degree) mass in both directions, every other
// off-diagonal cell gets small symmetric noise, and the diagonal takes the
// remainder of each row. Strength 0 leaves only the noise.
SimilarityKernel sample_similarity_kernel(int classes, double similarity_strength,
                                          const std::vector<std::pair<int, int>>& confusable_pairs,
                                          std::uint64_t seed);

// Row i is a multinomial draw with label_counts[i] trials and probabilities
// proportional to S(i, j) * bias[j].
ConfusionMatrix simulate_confusion(const SimilarityKernel& kernel,
                                   const std::vector<std::int64_t>& label_counts,
                                   const Eigen::VectorXd& prediction_bias,
                                   std::uint64_t seed);

// Log-normal column bias exp(strength * z_j), z standard normal.
Eigen::VectorXd sample_prediction_bias(int classes, double strength, std::uint64_t seed);

// Centroids drawn as N(0, scale^2 I) in `dim` dimensions.
Eigen::MatrixXd sample_centroids(int classes, int dim, double scale, std::uint64_t seed);

// Isotropic Gaussian clouds around each centroid; the prediction of a point
// is its nearest centroid, exact ties broken uniformly at random.
EmbeddedDataset generate_embeddings(const EmbeddingSpec& spec);

}  // namespace bisnorm
