#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "bisnorm/confusion_matrix.hpp"
#include "bisnorm/errors.hpp"

namespace bisnorm {

// Stopping rule shared by ipf() and ras(). `tolerance` bounds the L1
// marginal residual; `max_steps` counts half-sweeps (a row pass and a
// column pass add 2), so it must be even. The step budget is generous
// because smoothed sparse confusion matrices (zero pattern without total
// support) converge linearly but with a rate close to 1.
struct IpfConfig {
  double tolerance = 1e-10;
  int max_steps = 20'000'000;
  // Keep the residual after every sweep in IpfResult::residual_trace.
  bool record_trace = false;

  void validate() const;
};

struct IpfResult {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd row_scales;  // diag(D1)
  Eigen::VectorXd col_scales;  // diag(D2)
  int steps = 0;
  double residual = 0.0;
  bool converged = false;
  // Residual after each full sweep, when IpfConfig::record_trace is set.
  std::vector<double> residual_trace;
};

// Thrown when the iteration exhausts max_steps. Carries the last iterate.
class NonConvergenceError : public Error {
 public:
  explicit NonConvergenceError(IpfResult best);
  const IpfResult& best() const { return best_; }
  double residual() const { return best_.residual; }

 private:
  IpfResult best_;
};

// Weights a = 1/diag(D1), b = 1/diag(D2) such that
// diag(1/a) * M * diag(1/b) is bistochastic.
struct ScalingWeights {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

// ||Q 1 - u||_1 + ||Q^T 1 - v||_1
double marginal_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v);

// Iterative proportional fitting: exact row rescaling to `u`, then column
// rescaling to `v`, repeated until the marginal residual drops to
// cfg.tolerance or cfg.max_steps is reached. An input that already meets
// the tolerance is returned with steps == 0. Never throws on
// non-convergence; inspect `converged`.
IpfResult ipf(const Eigen::MatrixXd& m, const Eigen::VectorXd& u,
              const Eigen::VectorXd& v, const IpfConfig& cfg = {});

// The same fixed point computed through the diagonal factors only:
// D2 starts at the identity and alternates
//   D1_ii <- r_i / sum_j M_ij D2_jj,   D2_jj <- c_j / sum_i M_ij D1_ii.
// At least one sweep is always performed, so the factors are defined.
IpfResult ras(const Eigen::MatrixXd& m, const Eigen::VectorXd& r,
              const Eigen::VectorXd& c, const IpfConfig& cfg = {});

// ipf(smooth(M, eps), 1, 1, cfg) with its result. Does not throw on
// non-convergence.
IpfResult bistochastic_fit(const ConfusionMatrix& m, double eps,
                           const IpfConfig& cfg = {});

// bis(M): the I-divergence projection of smooth(M, eps) onto the
// bistochastic matrices. Throws NonConvergenceError if max_steps runs out.
ConfusionMatrix bistochastic_normalize(const ConfusionMatrix& m, double eps,
                                       const IpfConfig& cfg = {});
// Uses default_smoothing_eps(m).
ConfusionMatrix bistochastic_normalize(const ConfusionMatrix& m);

ScalingWeights scaling_weights(const ConfusionMatrix& m, double eps,
                               const IpfConfig& cfg = {});

// Smooths once with `eps`, then applies the requested normalization.
ConfusionMatrix apply_normalization(const ConfusionMatrix& m,
                                    NormalizationKind kind, double eps,
                                    const IpfConfig& cfg = {});

// Random matrices with row sums r and column sums c (within 1e-8), used to
// check that the diagonal scaling of M minimizes the I-divergence over the
// transport polytope. Each sample is a random mixture of permutation
// matrices plus positive noise, pulled onto the marginals by a tight IPF
// run. Only the size of `m` is used.
std::vector<Eigen::MatrixXd> lemma1_oracle(const Eigen::MatrixXd& m,
                                           const Eigen::VectorXd& r,
                                           const Eigen::VectorXd& c,
                                           int samples, std::uint64_t seed);

std::string ipf_diagnostics_json(const IpfResult& result);

}  // namespace bisnorm
