#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bisnorm/confusion_matrix.hpp"
#include "bisnorm/geometry.hpp"
#include "bisnorm/scaling.hpp"

namespace bisnorm {

// Everything both experiments need. Fields that only one experiment reads
// are ignored by the other.
struct Scenario {
  double alpha = 1.0;
  int classes = 10;
  int base_per_class = 100;
  double floor_fraction = 0.15;

  // Experiment 1: synthetic classifier.
  double similarity_strength = 0.3;
  std::vector<std::pair<int, int>> confusable_pairs;
  double bias_strength = 0.0;                   // log-normal sigma
  std::optional<Eigen::VectorXd> fixed_bias;    // overrides bias_strength
  bool identity_kernel = false;

  // Experiment 2: Gaussian clusters.
  int dim = 8;
  double centroid_scale = 1.0;
  double spread = 1.0;
  int projection_dim = 5;

  // Smoothing for every normalization; empty means default_smoothing_eps.
  std::optional<double> eps;
  IpfConfig ipf;

  std::vector<std::uint64_t> seeds;
  // Worker threads; 0 means BISNORM_THREADS or the hardware count.
  int threads = 0;

  void validate() const;
};

// Reads the scenario JSON: alpha, C, base_per_class, floor_fraction,
// similarity_strength, confusable_pairs, prediction_bias (number = log-normal
// strength, array = fixed vector), spread, seed (first seed), num_seeds, and
// optionally dim, centroid_scale, m, eps, tolerance, max_steps,
// identity_kernel, seeds (explicit list).
Scenario parse_scenario_json(std::string_view text);
std::string scenario_to_json(const Scenario& s);

enum class ScoreMetric { Overlap, OffDiagonalOverlap };

struct SummaryRow {
  std::string kind;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double win_rate = 0.0;
};

// Per-seed scores for each normalization kind. `scores[kind][k]` belongs to
// `seeds[k]`.
struct ExperimentReport {
  std::string scenario;  // JSON description
  std::vector<std::uint64_t> seeds;
  std::map<NormalizationKind, std::vector<double>> scores;

  std::vector<SummaryRow> summary() const;
  // Seeds where `kind` strictly beats every other kind.
  int wins(NormalizationKind kind) const;
};

// Inclusive linear-interpolation quantile (q in [0, 1]) of unsorted data.
double quantile(std::vector<double> values, double q);

// min, q1, median, q3, max and strict win-rate per kind.
std::vector<SummaryRow> summarize(const ExperimentReport& report);

// Matrices from one seed, kept for heatmaps.
struct Experiment1Sample {
  ConfusionMatrix balanced;
  ConfusionMatrix imbalanced;
  std::map<NormalizationKind, ConfusionMatrix> normalized;
};

// Per seed: balanced reference M1 from the seed's kernel with unit bias,
// imbalanced M2 under Dirichlet counts and sampled bias, then each
// normalization of smooth(M2) scored against all(M1).
ExperimentReport run_experiment1(const Scenario& s,
                                 ScoreMetric metric = ScoreMetric::Overlap);
Experiment1Sample experiment1_sample(const Scenario& s, std::uint64_t seed);

struct Experiment2Sample {
  ConfusionMatrix counts;
  std::map<GcmVariant, Eigen::MatrixXd> gcms;
  std::map<NormalizationKind, ConfusionMatrix> normalized;
};

// Per seed: Gaussian clusters under Dirichlet counts, nearest-centroid
// predictions, the four GCMs, and each GCM scored against every
// normalization of smooth(M). One report per GCM variant.
std::map<GcmVariant, ExperimentReport> run_experiment2(const Scenario& s);
Experiment2Sample experiment2_sample(const Scenario& s, std::uint64_t seed);

std::string scores_csv(const ExperimentReport& report);
std::string summary_csv(const ExperimentReport& report);

}  // namespace bisnorm
