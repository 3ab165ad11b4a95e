// Command-line front end: normalize | overlap | gcm | weights | exp1 | exp2.
//
// Exit codes: 0 success, 2 input error, 3 IPF non-convergence,
// 4 undefined metric.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bisnorm/confusion_matrix.hpp"
#include "bisnorm/embedding_io.hpp"
#include "bisnorm/errors.hpp"
#include "bisnorm/experiments.hpp"
#include "bisnorm/geometry.hpp"
#include "bisnorm/heatmap.hpp"
#include "bisnorm/matrix_io.hpp"
#include "bisnorm/scaling.hpp"

namespace fs = std::filesystem;
using namespace bisnorm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitUndefined = 4;

struct IpfFlags {
  std::optional<double> eps;
  double tolerance = IpfConfig{}.tolerance;
  int max_steps = IpfConfig{}.max_steps;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eps", eps, "Smoothing added to every entry (default 1e-6*M++/C^2)");
    cmd->add_option("--tolerance", tolerance, "L1 marginal residual bound");
    cmd->add_option("--max-steps", max_steps, "Half-sweep budget (even)");
  }
  IpfConfig config() const { return {tolerance, max_steps}; }
  double eps_for(const ConfusionMatrix& m) const {
    return eps ? *eps : default_smoothing_eps(m);
  }
};

fs::path sidecar_path(const fs::path& out) {
  fs::path p = out;
  p += ".ipf.json";
  return p;
}

void write_heatmap(const fs::path& dir, const std::string& name, const ConfusionMatrix& m) {
  write_text_file_atomic(dir / (name + ".svg"), render_heatmap_svg(m, name));
}

void write_report(const fs::path& dir, const std::string& prefix, const ExperimentReport& r) {
  write_text_file_atomic(dir / (prefix + "scores.csv"), scores_csv(r));
  write_text_file_atomic(dir / (prefix + "summary.csv"), summary_csv(r));
}

struct ExperimentFlags {
  std::string config;
  std::string outdir;
  std::optional<double> alpha;
  std::optional<int> num_seeds;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  void attach(CLI::App* cmd) {
    cmd->add_option("config", config, "Scenario JSON")->required();
    cmd->add_option("outdir", outdir, "Output directory")->required();
    cmd->add_option("--alpha", alpha, "Override Dirichlet concentration");
    cmd->add_option("--num-seeds", num_seeds, "Override seed count");
    cmd->add_option("--seed", seed, "Override first seed");
    cmd->add_option("--threads", threads, "Worker threads (default BISNORM_THREADS or all cores)");
  }

  Scenario load() const {
    auto doc = nlohmann::json::parse(read_text_file(config), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("scenario JSON is malformed");
    if (alpha) doc["alpha"] = *alpha;
    if (num_seeds || seed) {
      doc.erase("seeds");
      if (num_seeds) doc["num_seeds"] = *num_seeds;
      if (seed) doc["seed"] = *seed;
    }
    if (threads) doc["threads"] = *threads;
    return parse_scenario_json(doc.dump());
  }
};

int cmd_normalize(const std::string& in, const std::string& out, const std::string& kind_name,
                  const IpfFlags& flags) {
  const auto kind = parse_normalization_kind(kind_name);
  const ConfusionMatrix m = read_confusion(in);
  const double eps = flags.eps_for(m);
  if (kind != NormalizationKind::Bis) {
    // The standard normalizations only smooth when asked to.
    const ConfusionMatrix src = flags.eps ? smooth(m, eps) : m;
    ConfusionMatrix result = kind == NormalizationKind::Row   ? row_normalize(src)
                             : kind == NormalizationKind::Col ? col_normalize(src)
                                                              : all_normalize(src);
    write_confusion(out, result);
    return kExitOk;
  }
  const IpfResult fit = bistochastic_fit(m, eps, flags.config());
  write_confusion(out, m.with_entries(fit.matrix));
  write_text_file_atomic(sidecar_path(out), ipf_diagnostics_json(fit));
  if (!fit.converged) {
    std::cerr << "IPF did not converge: residual " << fit.residual << " after " << fit.steps
              << " steps\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_overlap(const std::string& a, const std::string& b, bool offdiag) {
  const ConfusionMatrix p = read_confusion(a);
  const ConfusionMatrix q = read_confusion(b);
  if (p.size() != q.size()) throw DegenerateInputError("matrices have different sizes");
  double v = 0.0;
  if (offdiag) {
    const auto o = offdiag_overlap(p, q);
    if (!o) {
      std::cerr << "off-diagonal overlap undefined\n";
      return kExitUndefined;
    }
    v = *o;
  } else {
    v = overlap(p, q);
  }
  std::printf("overlap=%.6f l1=%.6f\n", v, 2.0 - 2.0 * v);
  return kExitOk;
}

int cmd_gcm(const std::string& in, const std::string& out, int m, const std::string& variant_name,
            const std::optional<std::string>& labels_path, const IpfFlags& flags) {
  const auto variant = parse_gcm_variant(variant_name);
  std::optional<std::vector<std::string>> labels;
  if (labels_path) labels = read_label_file(*labels_path);
  const EmbeddedDataset ds = read_embeddings(in, labels);
  if (m < 1 || m > ds.dim()) {
    throw ParameterError("--m must lie in [1, " + std::to_string(ds.dim()) + "]");
  }
  const ConfusionMatrix counts(count_confusion(ds), ds.class_names);
  const auto result =
      gcm_variants(ds, counts, m, flags.eps_for(counts), flags.config(), {variant});
  write_confusion(out, counts.with_entries(result.matrices.at(variant)));
  return kExitOk;
}

int cmd_weights(const std::string& in, const std::optional<std::string>& out,
                const IpfFlags& flags) {
  const ConfusionMatrix m = read_confusion(in);
  const ConfusionMatrix s = smooth(m, flags.eps_for(m));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.size());
  const IpfResult fit = ras(s.entries(), ones, ones, flags.config());
  auto doc = nlohmann::json::parse(ipf_diagnostics_json(fit));
  const Eigen::VectorXd a = fit.row_scales.cwiseInverse();
  const Eigen::VectorXd b = fit.col_scales.cwiseInverse();
  doc["a"] = std::vector<double>(a.data(), a.data() + a.size());
  doc["b"] = std::vector<double>(b.data(), b.data() + b.size());
  doc["labels"] = m.labels();
  const std::string text = doc.dump(2) + "\n";
  if (out) {
    write_text_file_atomic(*out, text);
  } else {
    std::cout << text;
  }
  return fit.converged ? kExitOk : kExitNonConvergence;
}

int cmd_exp1(const ExperimentFlags& flags) {
  const Scenario s = flags.load();
  const fs::path dir = flags.outdir;
  fs::create_directories(dir);
  write_report(dir, "", run_experiment1(s));
  write_report(dir, "offdiag_", run_experiment1(s, ScoreMetric::OffDiagonalOverlap));
  const auto sample = experiment1_sample(s, s.seeds.front());
  write_heatmap(dir, "balanced", sample.balanced);
  write_heatmap(dir, "imbalanced", sample.imbalanced);
  for (const auto& [kind, m] : sample.normalized) write_heatmap(dir, std::string(to_string(kind)), m);
  return kExitOk;
}

int cmd_exp2(const ExperimentFlags& flags) {
  const Scenario s = flags.load();
  const fs::path dir = flags.outdir;
  fs::create_directories(dir);
  for (const auto& [variant, report] : run_experiment2(s)) {
    write_report(dir, "gcm_" + std::string(to_string(variant)) + "_", report);
  }
  const auto sample = experiment2_sample(s, s.seeds.front());
  write_heatmap(dir, "counts", sample.counts);
  for (const auto& [kind, m] : sample.normalized) write_heatmap(dir, std::string(to_string(kind)), m);
  for (const auto& [variant, g] : sample.gcms) {
    write_heatmap(dir, "gcm_" + std::string(to_string(variant)), sample.counts.with_entries(g));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bistochastic normalization of confusion matrices and geometric confusion matrices"};
  app.require_subcommand(1);

  std::string in, out, second, kind = "bis", variant = "all";
  bool offdiag = false;
  int m = 5;
  std::optional<std::string> labels_path, weights_out;
  IpfFlags ipf_flags;
  ExperimentFlags exp_flags;

  auto* normalize = app.add_subcommand("normalize", "Normalize a confusion matrix (CSV or JSON)");
  normalize->add_option("--kind", kind, "row | col | all | bis")
      ->check(CLI::IsMember({"row", "col", "all", "bis"}));
  normalize->add_option("input", in)->required();
  normalize->add_option("output", out)->required();
  ipf_flags.attach(normalize);

  auto* overlap_cmd = app.add_subcommand("overlap", "Overlap and L1 distance of two matrices");
  overlap_cmd->add_flag("--offdiag", offdiag, "Compare off-diagonal parts only");
  overlap_cmd->add_option("a", in)->required();
  overlap_cmd->add_option("b", second)->required();

  auto* gcm_cmd = app.add_subcommand("gcm", "Geometric confusion matrix from embeddings");
  gcm_cmd->add_option("--m", m, "Projected dimension");
  gcm_cmd->add_option("--variant", variant, "all | row | col | bis")
      ->check(CLI::IsMember({"row", "col", "all", "bis"}));
  gcm_cmd->add_option("--labels", labels_path, "Label order file, one per line");
  gcm_cmd->add_option("input", in)->required();
  gcm_cmd->add_option("output", out)->required();
  ipf_flags.attach(gcm_cmd);

  auto* weights = app.add_subcommand("weights", "Scaling weights a, b of a confusion matrix");
  weights->add_option("input", in)->required();
  weights->add_option("--output", weights_out, "Write JSON here instead of stdout");
  ipf_flags.attach(weights);

  auto* exp1 = app.add_subcommand("exp1", "Balanced-reference recovery experiment");
  auto* exp2 = app.add_subcommand("exp2", "GCM correspondence experiment");
  exp_flags.attach(exp1);
  exp_flags.attach(exp2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*normalize) return cmd_normalize(in, out, kind, ipf_flags);
    if (*overlap_cmd) return cmd_overlap(in, second, offdiag);
    if (*gcm_cmd) return cmd_gcm(in, out, m, variant, labels_path, ipf_flags);
    if (*weights) return cmd_weights(in, weights_out, ipf_flags);
    if (*exp1) return cmd_exp1(exp_flags);
    if (*exp2) return cmd_exp2(exp_flags);
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
