#include "bisnorm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bisnorm/errors.hpp"
#include "bisnorm/matrix_io.hpp"
#include "bisnorm/rng.hpp"
#include "bisnorm/synthgen.hpp"

namespace bisnorm {
namespace {

// Roles for derive_seed within one experiment seed.
constexpr std::uint64_t kRoleKernel = 11;
constexpr std::uint64_t kRoleBalanced = 12;
constexpr std::uint64_t kRoleImbalanced = 13;
constexpr std::uint64_t kRoleCounts = 14;
constexpr std::uint64_t kRoleBias = 15;
constexpr std::uint64_t kRoleCentroids = 16;
constexpr std::uint64_t kRoleEmbeddings = 17;

int resolve_threads(int requested, std::size_t work) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("BISNORM_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(work, 1)));
}

// Runs body(k) for k in [0, count) over `threads` workers. Each index is
// written by exactly one worker, so results land in seed order regardless of
// scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = static_cast<std::size_t>(t); k < count;
               k += static_cast<std::size_t>(threads)) {
            body(k);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double smoothing_for(const Scenario& s, const ConfusionMatrix& m) {
  return s.eps ? *s.eps : default_smoothing_eps(m);
}

std::map<NormalizationKind, ConfusionMatrix> all_normalizations(const Scenario& s,
                                                                const ConfusionMatrix& m) {
  std::map<NormalizationKind, ConfusionMatrix> out;
  const double eps = smoothing_for(s, m);
  for (auto kind : kAllNormalizationKinds) {
    out.emplace(kind, apply_normalization(m, kind, eps, s.ipf));
  }
  return out;
}

double score(const ConfusionMatrix& candidate, const ConfusionMatrix& reference,
             ScoreMetric metric) {
  if (metric == ScoreMetric::Overlap) return overlap(candidate, reference);
  const auto v = offdiag_overlap(candidate, reference);
  if (!v) throw DegenerateInputError("off-diagonal overlap undefined for this seed");
  return *v;
}

std::vector<std::int64_t> balanced_counts(const Scenario& s) {
  return std::vector<std::int64_t>(static_cast<std::size_t>(s.classes), s.base_per_class);
}

std::vector<std::int64_t> dirichlet_counts(const Scenario& s, std::uint64_t seed) {
  HeterogeneityConfig h;
  h.alpha = s.alpha;
  h.classes = s.classes;
  h.base_per_class = s.base_per_class;
  h.floor_fraction = s.floor_fraction;
  h.seed = derive_seed(seed, kRoleCounts);
  return sample_class_counts(h);
}

ExperimentReport empty_report(const Scenario& s) {
  ExperimentReport r;
  r.scenario = scenario_to_json(s);
  r.seeds = s.seeds;
  for (auto kind : kAllNormalizationKinds) r.scores[kind].assign(s.seeds.size(), 0.0);
  return r;
}

}  // namespace

void Scenario::validate() const {
  HeterogeneityConfig h{alpha, classes, base_per_class, floor_fraction, 0};
  h.validate();
  if (!(similarity_strength >= 0.0 && similarity_strength < 1.0)) {
    throw ParameterError("similarity_strength must lie in [0, 1)");
  }
  if (!(bias_strength >= 0.0)) throw ParameterError("bias strength must be nonnegative");
  if (fixed_bias && (fixed_bias->size() != classes || !(fixed_bias->array() > 0.0).all())) {
    throw ParameterError("prediction_bias vector must have C positive entries");
  }
  if (dim < 1 || projection_dim < 1 || projection_dim > dim) {
    throw ParameterError("need 1 <= m <= dim");
  }
  if (!(spread > 0.0) || !(centroid_scale >= 0.0)) {
    throw ParameterError("spread must be positive and centroid_scale nonnegative");
  }
  if (eps && !(*eps > 0.0)) throw ParameterError("eps must be positive");
  if (seeds.empty()) throw ParameterError("scenario needs at least one seed");
  ipf.validate();
}

Scenario parse_scenario_json(std::string_view text) {
  Scenario s;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
    s.alpha = doc.value("alpha", s.alpha);
    s.classes = doc.value("C", s.classes);
    s.base_per_class = doc.value("base_per_class", s.base_per_class);
    s.floor_fraction = doc.value("floor_fraction", s.floor_fraction);
    s.similarity_strength = doc.value("similarity_strength", s.similarity_strength);
    if (doc.contains("confusable_pairs")) {
      for (const auto& p : doc.at("confusable_pairs")) {
        if (!p.is_array() || p.size() != 2) throw ParseError("confusable pair must be [i, j]");
        s.confusable_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
      }
    }
    if (doc.contains("prediction_bias")) {
      const auto& b = doc.at("prediction_bias");
      if (b.is_number()) {
        s.bias_strength = b.get<double>();
      } else if (b.is_array()) {
        const auto v = b.get<std::vector<double>>();
        s.fixed_bias = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      } else {
        throw ParseError("prediction_bias must be a number or an array");
      }
    }
    s.identity_kernel = doc.value("identity_kernel", s.identity_kernel);
    s.dim = doc.value("dim", s.dim);
    s.centroid_scale = doc.value("centroid_scale", s.centroid_scale);
    s.spread = doc.value("spread", s.spread);
    s.projection_dim = doc.value("m", s.projection_dim);
    if (doc.contains("eps")) s.eps = doc.at("eps").get<double>();
    s.ipf.tolerance = doc.value("tolerance", s.ipf.tolerance);
    s.ipf.max_steps = doc.value("max_steps", s.ipf.max_steps);
    s.threads = doc.value("threads", s.threads);
    if (doc.contains("seeds")) {
      s.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      const auto first = doc.value("seed", std::uint64_t{0});
      const auto count = doc.value("num_seeds", 100);
      if (count < 1) throw ParseError("num_seeds must be positive");
      for (int k = 0; k < count; ++k) s.seeds.push_back(first + static_cast<std::uint64_t>(k));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  try {
    s.validate();
  } catch (const ParameterError& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::json doc;
  doc["alpha"] = s.alpha;
  doc["C"] = s.classes;
  doc["base_per_class"] = s.base_per_class;
  doc["floor_fraction"] = s.floor_fraction;
  doc["similarity_strength"] = s.similarity_strength;
  auto pairs = nlohmann::json::array();
  for (auto [i, j] : s.confusable_pairs) pairs.push_back({i, j});
  doc["confusable_pairs"] = pairs;
  if (s.fixed_bias) {
    doc["prediction_bias"] =
        std::vector<double>(s.fixed_bias->data(), s.fixed_bias->data() + s.fixed_bias->size());
  } else {
    doc["prediction_bias"] = s.bias_strength;
  }
  doc["identity_kernel"] = s.identity_kernel;
  doc["dim"] = s.dim;
  doc["centroid_scale"] = s.centroid_scale;
  doc["spread"] = s.spread;
  doc["m"] = s.projection_dim;
  if (s.eps) doc["eps"] = *s.eps;
  doc["tolerance"] = s.ipf.tolerance;
  doc["max_steps"] = s.ipf.max_steps;
  doc["seeds"] = s.seeds;
  return doc.dump();
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DegenerateInputError("quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

int ExperimentReport::wins(NormalizationKind kind) const {
  int count = 0;
  const auto& mine = scores.at(kind);
  for (std::size_t k = 0; k < mine.size(); ++k) {
    bool strict = true;
    for (const auto& [other, list] : scores) {
      if (other != kind && !(mine[k] > list[k])) {
        strict = false;
        break;
      }
    }
    if (strict) ++count;
  }
  return count;
}

std::vector<SummaryRow> ExperimentReport::summary() const { return summarize(*this); }

std::vector<SummaryRow> summarize(const ExperimentReport& report) {
  if (report.scores.empty() || report.seeds.empty()) {
    throw DegenerateInputError("cannot summarize an empty report");
  }
  std::vector<SummaryRow> rows;
  const double n = static_cast<double>(report.seeds.size());
  for (const auto& [kind, list] : report.scores) {
    if (list.size() != report.seeds.size()) {
      throw DegenerateInputError("score list length differs from seed count");
    }
    SummaryRow row;
    row.kind = std::string(to_string(kind));
    row.min = quantile(list, 0.0);
    row.q1 = quantile(list, 0.25);
    row.median = quantile(list, 0.5);
    row.q3 = quantile(list, 0.75);
    row.max = quantile(list, 1.0);
    row.win_rate = report.wins(kind) / n;
    rows.push_back(row);
  }
  return rows;
}

Experiment1Sample experiment1_sample(const Scenario& s, std::uint64_t seed) {
  const SimilarityKernel kernel =
      s.identity_kernel
          ? SimilarityKernel::identity(s.classes)
          : sample_similarity_kernel(s.classes, s.similarity_strength, s.confusable_pairs,
                                     derive_seed(seed, kRoleKernel));
  const Eigen::VectorXd unit = Eigen::VectorXd::Ones(s.classes);
  const Eigen::VectorXd bias =
      s.fixed_bias ? *s.fixed_bias
                   : sample_prediction_bias(s.classes, s.bias_strength, derive_seed(seed, kRoleBias));
  ConfusionMatrix balanced =
      simulate_confusion(kernel, balanced_counts(s), unit, derive_seed(seed, kRoleBalanced));
  ConfusionMatrix imbalanced = simulate_confusion(kernel, dirichlet_counts(s, seed), bias,
                                                  derive_seed(seed, kRoleImbalanced));
  auto normalized = all_normalizations(s, imbalanced);
  return {std::move(balanced), std::move(imbalanced), std::move(normalized)};
}

ExperimentReport run_experiment1(const Scenario& s, ScoreMetric metric) {
  s.validate();
  ExperimentReport report = empty_report(s);
  parallel_for(s.seeds.size(), resolve_threads(s.threads, s.seeds.size()), [&](std::size_t k) {
    const auto sample = experiment1_sample(s, s.seeds[k]);
    const ConfusionMatrix reference = all_normalize(sample.balanced);
    for (const auto& [kind, matrix] : sample.normalized) {
      report.scores.at(kind)[k] = score(matrix, reference, metric);
    }
  });
  return report;
}

Experiment2Sample experiment2_sample(const Scenario& s, std::uint64_t seed) {
  EmbeddingSpec spec;
  spec.centroids = sample_centroids(s.classes, s.dim, s.centroid_scale,
                                    derive_seed(seed, kRoleCentroids));
  spec.spread = s.spread;
  spec.counts = dirichlet_counts(s, seed);
  spec.seed = derive_seed(seed, kRoleEmbeddings);
  const EmbeddedDataset ds = generate_embeddings(spec);
  ConfusionMatrix counts(count_confusion(ds));
  const double eps = smoothing_for(s, counts);
  auto variants = gcm_variants(ds, counts, s.projection_dim, eps, s.ipf);
  auto normalized = all_normalizations(s, counts);
  return {std::move(counts), std::move(variants.matrices), std::move(normalized)};
}

std::map<GcmVariant, ExperimentReport> run_experiment2(const Scenario& s) {
  s.validate();
  std::map<GcmVariant, ExperimentReport> reports;
  for (auto v : kAllGcmVariants) reports.emplace(v, empty_report(s));
  parallel_for(s.seeds.size(), resolve_threads(s.threads, s.seeds.size()), [&](std::size_t k) {
    const auto sample = experiment2_sample(s, s.seeds[k]);
    for (const auto& [variant, g] : sample.gcms) {
      const ConfusionMatrix geometric = sample.counts.with_entries(g);
      auto& report = reports.at(variant);
      for (const auto& [kind, matrix] : sample.normalized) {
        report.scores.at(kind)[k] = overlap(geometric, matrix);
      }
    }
  });
  return reports;
}

std::string scores_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "kind,seed,score\n";
  for (const auto& [kind, list] : report.scores) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      out << to_string(kind) << ',' << report.seeds[k] << ',' << format_real(list[k]) << '\n';
    }
  }
  return out.str();
}

std::string summary_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "kind,min,q1,median,q3,max,win_rate\n";
  for (const auto& row : summarize(report)) {
    out << row.kind << ',' << format_real(row.min) << ',' << format_real(row.q1) << ','
        << format_real(row.median) << ',' << format_real(row.q3) << ',' << format_real(row.max)
        << ',' << format_real(row.win_rate) << '\n';
  }
  return out.str();
}

}  // namespace bisnorm
