#include <doctest.h>

#include <algorithm>
#include <cstdlib>

#include "bisnorm/errors.hpp"
#include "bisnorm/experiments.hpp"

using namespace bisnorm;

namespace {

Scenario small_scenario(int seeds) {
  Scenario s;
  s.classes = 5;
  s.base_per_class = 60;
  s.alpha = 0.3;
  s.similarity_strength = 0.3;
  s.confusable_pairs = {{0, 1}};
  s.bias_strength = 0.5;
  s.dim = 4;
  s.projection_dim = 3;
  for (int k = 0; k < seeds; ++k) s.seeds.push_back(static_cast<std::uint64_t>(k));
  return s;
}

ExperimentReport handmade_report() {
  ExperimentReport r;
  r.seeds = {1, 2, 3, 4};
  r.scores[NormalizationKind::Row] = {0.5, 0.9, 0.7, 0.6};
  r.scores[NormalizationKind::Col] = {0.6, 0.9, 0.1, 0.6};
  r.scores[NormalizationKind::All] = {0.1, 0.2, 0.3, 0.4};
  r.scores[NormalizationKind::Bis] = {0.7, 0.8, 0.2, 0.6};
  return r;
}

}  // namespace

TEST_CASE("quantiles use inclusive linear interpolation") {
  CHECK(quantile({3.0}, 0.25) == 3.0);
  CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.0) == 1.0);
  CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 1.0) == 4.0);
  CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.75) == doctest::Approx(4.0));
  CHECK_THROWS_AS(quantile({}, 0.5), DegenerateInputError);
}

TEST_CASE("summary rows and strict win rates") {
  const auto r = handmade_report();
  // Seed 1: bis wins. Seed 2: row/col tie, nobody wins. Seed 3: row wins.
  // Seed 4: three-way tie.
  CHECK(r.wins(NormalizationKind::Bis) == 1);
  CHECK(r.wins(NormalizationKind::Row) == 1);
  CHECK(r.wins(NormalizationKind::Col) == 0);
  CHECK(r.wins(NormalizationKind::All) == 0);
  const auto rows = summarize(r);
  REQUIRE(rows.size() == 4);
  double total = 0.0;
  for (const auto& row : rows) {
    total += row.win_rate;
    CHECK(row.min <= row.q1);
    CHECK(row.q1 <= row.median);
    CHECK(row.median <= row.q3);
    CHECK(row.q3 <= row.max);
  }
  CHECK(total <= 1.0);
  const auto all = std::find_if(rows.begin(), rows.end(), [](const auto& x) { return x.kind == "all"; });
  CHECK(all->median == doctest::Approx(0.25));
  CHECK(all->min == doctest::Approx(0.1));

  ExperimentReport constant;
  constant.seeds = {5};
  for (auto k : kAllNormalizationKinds) constant.scores[k] = {0.42};
  for (const auto& row : summarize(constant)) {
    CHECK(row.min == row.max);
    CHECK(row.q1 == row.q3);
    CHECK(row.win_rate == 0.0);
  }
  CHECK_THROWS_AS(summarize(ExperimentReport{}), DegenerateInputError);
}

TEST_CASE("report CSV layout") {
  const auto r = handmade_report();
  const std::string scores = scores_csv(r);
  CHECK(scores.rfind("kind,seed,score\n", 0) == 0);
  CHECK(std::count(scores.begin(), scores.end(), '\n') == 17);
  CHECK(scores.find("bis,1,0.7\n") != std::string::npos);
  const std::string summary = summary_csv(r);
  CHECK(summary.rfind("kind,min,q1,median,q3,max,win_rate\n", 0) == 0);
  CHECK(summary.find("\nall,0.1,0.175,0.25,0.325,0.4,0\n") != std::string::npos);
}

TEST_CASE("scenario JSON parsing") {
  const auto s = parse_scenario_json(R"({"alpha":0.1,"C":6,"base_per_class":50,
      "confusable_pairs":[[0,1],[2,3]],"prediction_bias":1.5,"spread":0.7,
      "seed":10,"num_seeds":3,"m":4,"dim":6,"eps":1e-7,"tolerance":1e-9,"max_steps":1000})");
  CHECK(s.alpha == 0.1);
  CHECK(s.classes == 6);
  CHECK(s.confusable_pairs.size() == 2);
  CHECK(s.bias_strength == 1.5);
  CHECK_FALSE(s.fixed_bias.has_value());
  CHECK(s.seeds == std::vector<std::uint64_t>{10, 11, 12});
  CHECK(s.projection_dim == 4);
  CHECK(s.eps.value() == 1e-7);
  CHECK(s.ipf.max_steps == 1000);

  const auto fixed = parse_scenario_json(R"({"C":3,"prediction_bias":[1,2,3],"seeds":[7,9]})");
  REQUIRE(fixed.fixed_bias.has_value());
  CHECK((*fixed.fixed_bias)(2) == 3.0);
  CHECK(fixed.seeds == std::vector<std::uint64_t>{7, 9});
  CHECK(parse_scenario_json("{}").seeds.size() == 100);

  const auto round = parse_scenario_json(scenario_to_json(s));
  CHECK(round.alpha == s.alpha);
  CHECK(round.seeds == s.seeds);
  CHECK(round.confusable_pairs == s.confusable_pairs);

  CHECK_THROWS_AS(parse_scenario_json("{"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json("[]"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"alpha":-1})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"alpha":"x"})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"C":3,"prediction_bias":[1,2]})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"m":9,"dim":4})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"num_seeds":0})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"confusable_pairs":[[1]]})"), ParseError);
}

TEST_CASE("experiment 1 without distribution shift scores every kind alike") {
  // A large budget so class sizes are balanced up to ~1% allocation noise.
  Scenario s;
  s.alpha = 1e6;
  s.base_per_class = 10000;
  s.bias_strength = 0.0;
  s.similarity_strength = 0.3;
  s.confusable_pairs = {{0, 1}, {2, 3}};
  s.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto r = run_experiment1(s);
  for (const auto& row : summarize(r)) {
    CHECK(row.min > 0.9);
  }
  for (std::size_t k = 0; k < s.seeds.size(); ++k) {
    double lo = 1.0, hi = 0.0;
    for (const auto& [kind, list] : r.scores) {
      lo = std::min(lo, list[k]);
      hi = std::max(hi, list[k]);
    }
    CHECK(hi - lo <= 0.02);
  }
}

TEST_CASE("experiment 1 with an identity kernel recovers the diagonal") {
  Scenario s;
  s.alpha = 0.1;
  s.identity_kernel = true;
  s.bias_strength = 1.0;
  s.seeds = {0, 1, 2, 3, 4};
  const auto r = run_experiment1(s);
  for (double v : r.scores.at(NormalizationKind::Bis)) CHECK(v >= 0.99);

  const auto sample = experiment1_sample(s, 0);
  CHECK(sample.imbalanced.entries().isDiagonal());
  CHECK(sample.normalized.at(NormalizationKind::Bis).entries().isApprox(Eigen::MatrixXd::Identity(10, 10), 1e-4));
}

TEST_CASE("experiment reports are deterministic and independent of threading") {
  Scenario s = small_scenario(6);
  s.threads = 1;
  const auto a = run_experiment1(s);
  s.threads = 3;
  const auto b = run_experiment1(s);
  CHECK(scores_csv(a) == scores_csv(b));
  for (const auto& [kind, list] : a.scores) {
    CHECK(list.size() == 6);
    for (double v : list) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  const auto off = run_experiment1(s, ScoreMetric::OffDiagonalOverlap);
  CHECK(off.scores.at(NormalizationKind::Bis).size() == 6);

  s.threads = 1;
  const auto e1 = run_experiment2(s);
  s.threads = 2;
  const auto e2 = run_experiment2(s);
  REQUIRE(e1.size() == 4);
  for (auto v : kAllGcmVariants) {
    CHECK(scores_csv(e1.at(v)) == scores_csv(e2.at(v)));
    CHECK(e1.at(v).scores.at(NormalizationKind::Row).size() == 6);
  }
}

TEST_CASE("BISNORM_THREADS does not change results") {
  Scenario s = small_scenario(4);
  const auto a = run_experiment1(s);
  ::setenv("BISNORM_THREADS", "2", 1);
  const auto b = run_experiment1(s);
  ::unsetenv("BISNORM_THREADS");
  CHECK(scores_csv(a) == scores_csv(b));
}

TEST_CASE("experiment 2 on separated clusters agrees everywhere") {
  Scenario s;
  // Nearly equal class sizes; with imbalance the diagonals of row(M) and
  // all(M) legitimately differ.
  s.classes = 4;
  s.alpha = 1.0;
  s.floor_fraction = 0.99;
  s.dim = 5;
  s.projection_dim = 5;
  s.centroid_scale = 40.0;
  s.spread = 0.3;
  s.seeds = {0, 1, 2};
  for (const auto& [variant, report] : run_experiment2(s)) {
    for (const auto& [kind, list] : report.scores) {
      for (double v : list) CHECK(v >= 0.98);
    }
  }
  const auto sample = experiment2_sample(s, 0);
  CHECK(sample.counts.entries().isDiagonal());
  CHECK(sample.gcms.size() == 4);
  CHECK(sample.normalized.size() == 4);
}

TEST_CASE("invalid scenarios are rejected before running") {
  Scenario s = small_scenario(0);
  CHECK_THROWS_AS(run_experiment1(s), ParameterError);
  s.seeds = {1};
  s.projection_dim = 9;
  CHECK_THROWS_AS(run_experiment2(s), ParameterError);
}
