#include "bisnorm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bisnorm/errors.hpp"
#include "bisnorm/rng.hpp"

namespace bisnorm {
namespace {

// Total off-diagonal noise per row, as a fraction of what the pairs leave.
constexpr double kNoiseShare = 0.02;

}  // namespace

void HeterogeneityConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("Dirichlet alpha must be positive");
  }
  if (classes < 2) throw ParameterError("need at least 2 classes");
  if (base_per_class < 1) throw ParameterError("base_per_class must be positive");
  if (!(floor_fraction >= 0.0 && floor_fraction < 1.0)) {
    throw ParameterError("floor_fraction must lie in [0, 1)");
  }
}

SimilarityKernel SimilarityKernel::identity(int classes) {
  return {Eigen::MatrixXd::Identity(classes, classes)};
}

std::vector<std::int64_t> sample_class_counts(const HeterogeneityConfig& cfg) {
  cfg.validate();
  const auto c = static_cast<std::size_t>(cfg.classes);
  const auto floor_count =
      static_cast<std::int64_t>(std::floor(cfg.floor_fraction * cfg.base_per_class));
  const std::int64_t budget = static_cast<std::int64_t>(cfg.classes) * cfg.base_per_class;
  const std::int64_t remaining = budget - static_cast<std::int64_t>(c) * floor_count;

  Rng rng(cfg.seed, streams::kClassCounts);
  const auto probs = rng.dirichlet(c, cfg.alpha);
  auto counts = rng.multinomial(remaining, probs);
  for (auto& n : counts) n += floor_count;
  return counts;
}

SimilarityKernel sample_similarity_kernel(int classes, double similarity_strength,
                                          const std::vector<std::pair<int, int>>& confusable_pairs,
                                          std::uint64_t seed) {
  if (classes < 2) throw ParameterError("need at least 2 classes");
  if (!(similarity_strength >= 0.0 && similarity_strength < 1.0)) {
    throw ParameterError("similarity_strength must lie in [0, 1)");
  }
  std::vector<int> degree(static_cast<std::size_t>(classes), 0);
  for (auto [i, j] : confusable_pairs) {
    if (i < 0 || j < 0 || i >= classes || j >= classes || i == j) {
      throw ParameterError("confusable pair out of range or on the diagonal");
    }
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(j)];
  }
  for (std::size_t a = 0; a < confusable_pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < confusable_pairs.size(); ++b) {
      const auto [i1, j1] = confusable_pairs[a];
      const auto [i2, j2] = confusable_pairs[b];
      if ((i1 == i2 && j1 == j2) || (i1 == j2 && j1 == i2)) {
        throw ParameterError("confusable pairs must be distinct");
      }
    }
  }

  Rng rng(seed, streams::kKernel);
  const double noise_total = kNoiseShare * (1.0 - similarity_strength);
  const double noise_cell = noise_total / (classes - 1);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(classes, classes);
  // Symmetric off-diagonal part; a symmetric row-stochastic matrix is also
  // column-stochastic, so the kernel itself is bistochastic.
  for (int i = 0; i < classes; ++i) {
    for (int j = i + 1; j < classes; ++j) {
      const double v = noise_cell * rng.uniform(0.5, 1.0);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  for (auto [i, j] : confusable_pairs) {
    const int deg = std::max(degree[static_cast<std::size_t>(i)],
                             degree[static_cast<std::size_t>(j)]);
    const double mass = similarity_strength / (2.0 * deg);
    s(i, j) += mass;
    s(j, i) += mass;
  }
  for (int i = 0; i < classes; ++i) {
    s(i, i) = 1.0 - s.row(i).sum();
  }
  return {s};
}

ConfusionMatrix simulate_confusion(const SimilarityKernel& kernel,
                                   const std::vector<std::int64_t>& label_counts,
                                   const Eigen::VectorXd& prediction_bias,
                                   std::uint64_t seed) {
  const auto c = kernel.s.rows();
  if (kernel.s.cols() != c || static_cast<Eigen::Index>(label_counts.size()) != c ||
      prediction_bias.size() != c) {
    throw DegenerateInputError("kernel, counts and bias sizes differ");
  }
  if (!(prediction_bias.array() > 0.0).all()) {
    throw ParameterError("prediction bias must be strictly positive");
  }
  Rng rng(seed, streams::kConfusion);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(c, c);
  std::vector<double> probs(static_cast<std::size_t>(c));
  for (Eigen::Index i = 0; i < c; ++i) {
    const auto n = label_counts[static_cast<std::size_t>(i)];
    if (n < 0) throw ParameterError("label counts must be nonnegative");
    for (Eigen::Index j = 0; j < c; ++j) {
      probs[static_cast<std::size_t>(j)] = kernel.s(i, j) * prediction_bias[j];
    }
    const auto row = rng.multinomial(n, probs);
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = static_cast<double>(row[static_cast<std::size_t>(j)]);
    }
  }
  return ConfusionMatrix(std::move(m));
}

Eigen::VectorXd sample_prediction_bias(int classes, double strength, std::uint64_t seed) {
  if (!(strength >= 0.0)) throw ParameterError("bias strength must be nonnegative");
  Rng rng(seed, streams::kBias);
  Eigen::VectorXd bias(classes);
  for (int j = 0; j < classes; ++j) bias[j] = std::exp(strength * rng.normal());
  return bias;
}

Eigen::MatrixXd sample_centroids(int classes, int dim, double scale, std::uint64_t seed) {
  if (classes < 2 || dim < 1) throw ParameterError("centroid shape must be positive");
  Rng rng(seed, streams::kCentroids);
  Eigen::MatrixXd centroids(classes, dim);
  for (int i = 0; i < classes; ++i) {
    for (int k = 0; k < dim; ++k) centroids(i, k) = scale * rng.normal();
  }
  return centroids;
}

EmbeddedDataset generate_embeddings(const EmbeddingSpec& spec) {
  const auto c = spec.centroids.rows();
  const auto dim = spec.centroids.cols();
  if (c < 2 || dim < 1) throw ParameterError("need at least 2 centroids");
  if (!(spec.spread > 0.0)) throw ParameterError("spread must be positive");
  if (static_cast<Eigen::Index>(spec.counts.size()) != c) {
    throw ParameterError("one count per centroid required");
  }
  if (std::any_of(spec.counts.begin(), spec.counts.end(), [](auto n) { return n < 1; })) {
    throw ParameterError("every class needs at least one point");
  }
  const auto total = std::accumulate(spec.counts.begin(), spec.counts.end(), std::int64_t{0});

  Rng rng(spec.seed, streams::kEmbeddings);
  EmbeddedDataset ds;
  ds.classes = static_cast<int>(c);
  ds.points.resize(total, dim);
  ds.labels.reserve(static_cast<std::size_t>(total));
  ds.predictions.reserve(static_cast<std::size_t>(total));
  std::vector<int> ties;
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < c; ++i) {
    for (std::int64_t k = 0; k < spec.counts[static_cast<std::size_t>(i)]; ++k, ++row) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        ds.points(row, d) = spec.centroids(i, d) + spec.spread * rng.normal();
      }
      double best = 0.0;
      ties.clear();
      for (Eigen::Index j = 0; j < c; ++j) {
        const double dist = (ds.points.row(row) - spec.centroids.row(j)).squaredNorm();
        if (ties.empty() || dist < best) {
          best = dist;
          ties.assign(1, static_cast<int>(j));
        } else if (dist == best) {
          ties.push_back(static_cast<int>(j));
        }
      }
      const int pred = ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
      ds.labels.push_back(static_cast<int>(i));
      ds.predictions.push_back(pred);
    }
  }
  return ds;
}

}  // namespace bisnorm
