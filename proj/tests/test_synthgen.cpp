#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bisnorm/errors.hpp"
#include "bisnorm/rng.hpp"
#include "bisnorm/synthgen.hpp"

using namespace bisnorm;

namespace {

double max_min_ratio(const std::vector<std::int64_t>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

}  // namespace

TEST_CASE("class counts keep the floor and the budget") {
  HeterogeneityConfig cfg{10.0, 10, 100, 0.15, 3};
  const auto counts = sample_class_counts(cfg);
  CHECK(counts.size() == 10);
  CHECK(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) == 1000);
  for (auto n : counts) CHECK(n >= 15);
  CHECK(sample_class_counts(cfg) == counts);
  cfg.seed = 4;
  CHECK(sample_class_counts(cfg) != counts);

  CHECK_THROWS_AS(sample_class_counts({0.0, 10, 100, 0.15, 0}), ParameterError);
  CHECK_THROWS_AS(sample_class_counts({1.0, 1, 100, 0.15, 0}), ParameterError);
  CHECK_THROWS_AS(sample_class_counts({1.0, 10, 100, 1.0, 0}), ParameterError);
}

TEST_CASE("Dirichlet floor holds at every heterogeneity level") {
  for (double alpha : {10.0, 3.0, 1.0, 0.3, 0.1}) {
    std::int64_t lowest = 1 << 30;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto counts = sample_class_counts({alpha, 10, 100, 0.15, seed});
      lowest = std::min(lowest, *std::min_element(counts.begin(), counts.end()));
    }
    CHECK(lowest >= 15);
  }
}

TEST_CASE("heterogeneity grows as alpha shrinks") {
  double previous = 0.0;
  for (double alpha : {10.0, 3.0, 1.0, 0.3, 0.1}) {
    double mean_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      mean_ratio += max_min_ratio(sample_class_counts({alpha, 10, 100, 0.15, seed}));
    }
    mean_ratio /= 200.0;
    CHECK(mean_ratio >= previous);
    previous = mean_ratio;
  }
}

TEST_CASE("huge alpha gives near-balanced counts") {
  // A large budget keeps the multinomial allocation noise (about
  // 1/sqrt(count)) well below the 20% band.
  int balanced = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    if (max_min_ratio(sample_class_counts({1e6, 10, 10000, 0.15, seed})) <= 1.2) ++balanced;
  }
  CHECK(balanced >= 48);
}

TEST_CASE("similarity kernel structure") {
  const auto k0 = sample_similarity_kernel(6, 0.0, {}, 1);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(k0.s.row(i).sum() - 1.0) <= 1e-12);
    for (int j = 0; j < 6; ++j) {
      if (i != j) CHECK(k0.s(i, j) <= 0.02 / 5 + 1e-15);
    }
  }

  const auto k = sample_similarity_kernel(6, 0.3, {{1, 2}, {3, 4}}, 1);
  CHECK((k.s - k.s.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((k.s.array() >= 0).all());
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(k.s.row(i).sum() - 1.0) <= 1e-12);
    for (int j = 0; j < 6; ++j) {
      if (i != j) CHECK(k.s(i, i) > k.s(i, j));
    }
  }
  for (int j = 0; j < 6; ++j) {
    if (j != 1 && j != 2) CHECK(k.s(1, 2) > k.s(1, j));
    if (j != 1 && j != 2) CHECK(k.s(2, 1) > k.s(2, j));
  }

  // A class in two pairs still keeps a dominant diagonal.
  const auto hub = sample_similarity_kernel(4, 0.9, {{0, 1}, {0, 2}, {0, 3}}, 2);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(hub.s(i, i) > hub.s(i, j));
    }
  }

  CHECK(sample_similarity_kernel(6, 0.3, {{1, 2}}, 9).s == sample_similarity_kernel(6, 0.3, {{1, 2}}, 9).s);
  CHECK_THROWS_AS(sample_similarity_kernel(6, 1.0, {}, 1), ParameterError);
  CHECK_THROWS_AS(sample_similarity_kernel(6, 0.3, {{1, 1}}, 1), ParameterError);
  CHECK_THROWS_AS(sample_similarity_kernel(6, 0.3, {{1, 2}, {2, 1}}, 1), ParameterError);
  CHECK_THROWS_AS(sample_similarity_kernel(6, 0.3, {{1, 6}}, 1), ParameterError);
}

TEST_CASE("simulated confusion") {
  const auto kernel = SimilarityKernel::identity(4);
  const std::vector<std::int64_t> counts{10, 0, 30, 5};
  const auto m = simulate_confusion(kernel, counts, Eigen::Vector4d::Ones(), 1);
  CHECK(m.entries().isDiagonal());
  for (int i = 0; i < 4; ++i) CHECK(m.row_sums()(i) == static_cast<double>(counts[static_cast<std::size_t>(i)]));
  CHECK(simulate_confusion(kernel, counts, Eigen::Vector4d::Ones(), 1).entries() == m.entries());
  CHECK_THROWS_AS(simulate_confusion(kernel, counts, Eigen::Vector4d(1, 0, 1, 1), 1), ParameterError);
  CHECK_THROWS_AS(simulate_confusion(kernel, {1, 2}, Eigen::Vector4d::Ones(), 1), DegenerateInputError);
}

TEST_CASE("simulated confusion obeys the law of large numbers") {
  const auto kernel = sample_similarity_kernel(5, 0.4, {{0, 1}, {2, 3}}, 7);
  const Eigen::VectorXd bias = sample_prediction_bias(5, 0.8, 7);
  const std::int64_t n = 200000;
  const auto m = simulate_confusion(kernel, std::vector<std::int64_t>(5, n), bias, 7);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd w = kernel.s.row(i).transpose().cwiseProduct(bias);
    const Eigen::VectorXd p = w / w.sum();
    for (int j = 0; j < 5; ++j) {
      const double se = std::sqrt(p(j) * (1 - p(j)) / static_cast<double>(n));
      CHECK(std::abs(m(i, j) / static_cast<double>(n) - p(j)) <= 3 * se + 1e-12);
    }
  }
}

TEST_CASE("prediction bias and centroids") {
  const auto b0 = sample_prediction_bias(5, 0.0, 1);
  CHECK(b0 == Eigen::VectorXd::Ones(5));
  const auto b = sample_prediction_bias(5, 1.0, 1);
  CHECK((b.array() > 0).all());
  CHECK(b == sample_prediction_bias(5, 1.0, 1));
  const auto c = sample_centroids(3, 4, 2.0, 1);
  CHECK(c.rows() == 3);
  CHECK(c.cols() == 4);
  CHECK(c == sample_centroids(3, 4, 2.0, 1));
  CHECK(sample_centroids(3, 4, 0.0, 1).isZero());
}

TEST_CASE("embeddings from separated clusters are classified perfectly") {
  EmbeddingSpec spec{20.0 * Eigen::MatrixXd::Identity(4, 5), 0.5, {10, 20, 30, 40}, 3};
  const auto ds = generate_embeddings(spec);
  CHECK(ds.size() == 100);
  CHECK(ds.dim() == 5);
  CHECK(ds.labels == ds.predictions);
  CHECK_NOTHROW(ds.validate());

  const auto again = generate_embeddings(spec);
  CHECK(again.points == ds.points);
  CHECK(again.predictions == ds.predictions);
}

TEST_CASE("coincident centroids split their points evenly") {
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(3, 2);
  centroids.row(2) << 100, 100;
  EmbeddingSpec spec{centroids, 1.0, {150, 150, 50}, 11};
  const auto ds = generate_embeddings(spec);
  int to0 = 0, to1 = 0;
  for (std::size_t k = 0; k < ds.labels.size(); ++k) {
    if (ds.labels[k] == 2) continue;
    to0 += ds.predictions[k] == 0;
    to1 += ds.predictions[k] == 1;
  }
  CHECK(to0 + to1 == 300);
  CHECK(to0 >= 90);
  CHECK(to0 <= 210);
}

TEST_CASE("embedding spec validation") {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(generate_embeddings({c, 0.0, {1, 1}, 0}), ParameterError);
  CHECK_THROWS_AS(generate_embeddings({c, 1.0, {1}, 0}), ParameterError);
  CHECK_THROWS_AS(generate_embeddings({c, 1.0, {1, 0}, 0}), ParameterError);
}
