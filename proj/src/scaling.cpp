#include "bisnorm/scaling.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "bisnorm/rng.hpp"

namespace bisnorm {
namespace {

constexpr std::uint64_t kOracleStream = 7;

void check_inputs(const Eigen::MatrixXd& m, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& v, const IpfConfig& cfg) {
  cfg.validate();
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DegenerateInputError("scaling requires a square matrix");
  }
  if (u.size() != m.rows() || v.size() != m.cols()) {
    throw DegenerateInputError("marginal length does not match matrix size");
  }
  if (!m.allFinite() || !(m.array() > 0.0).all()) {
    throw DomainError("scaling requires a strictly positive matrix");
  }
  if (!(u.array() > 0.0).all() || !(v.array() > 0.0).all()) {
    throw DomainError("target marginals must be strictly positive");
  }
  const double su = u.sum();
  if (std::abs(su - v.sum()) > 1e-9 * su) {
    throw InfeasibleMarginalsError("row and column targets have different totals");
  }
}

std::vector<double> vec(const Eigen::VectorXd& x) {
  return {x.data(), x.data() + x.size()};
}

}  // namespace

void IpfConfig::validate() const {
  if (!(tolerance > 0.0)) throw ParameterError("IPF tolerance must be positive");
  if (max_steps < 2 || max_steps % 2 != 0) {
    throw ParameterError("IPF max_steps must be even and at least 2");
  }
}

NonConvergenceError::NonConvergenceError(IpfResult best)
    : Error("IPF did not converge within max_steps (residual " +
            std::to_string(best.residual) + ")"),
      best_(std::move(best)) {}

double marginal_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v) {
  return (q.rowwise().sum() - u).lpNorm<1>() +
         (q.colwise().sum().transpose() - v).lpNorm<1>();
}

IpfResult ipf(const Eigen::MatrixXd& m, const Eigen::VectorXd& u,
              const Eigen::VectorXd& v, const IpfConfig& cfg) {
  check_inputs(m, u, v, cfg);
  IpfResult out;
  out.matrix = m;
  out.row_scales = Eigen::VectorXd::Ones(m.rows());
  out.col_scales = Eigen::VectorXd::Ones(m.cols());
  out.residual = marginal_residual(out.matrix, u, v);
  if (out.residual <= cfg.tolerance) {
    out.converged = true;
    return out;
  }
  Eigen::MatrixXd& q = out.matrix;
  while (true) {
    const Eigen::VectorXd rf = u.cwiseQuotient(q.rowwise().sum());
    q = rf.asDiagonal() * q;
    out.row_scales.array() *= rf.array();

    const Eigen::VectorXd cf = v.cwiseQuotient(q.colwise().sum().transpose());
    q = q * cf.asDiagonal();
    out.col_scales.array() *= cf.array();

    out.steps += 2;
    out.residual = marginal_residual(q, u, v);
    if (cfg.record_trace) out.residual_trace.push_back(out.residual);
    if (out.residual <= cfg.tolerance) {
      out.converged = true;
      break;
    }
    if (out.steps >= cfg.max_steps) break;
  }
  return out;
}

IpfResult ras(const Eigen::MatrixXd& m, const Eigen::VectorXd& r,
              const Eigen::VectorXd& c, const IpfConfig& cfg) {
  check_inputs(m, r, c, cfg);
  IpfResult out;
  Eigen::VectorXd d1(m.rows());
  Eigen::VectorXd d2 = Eigen::VectorXd::Ones(m.cols());
  while (true) {
    d1 = r.cwiseQuotient(m * d2);
    d2 = c.cwiseQuotient(m.transpose() * d1);
    out.steps += 2;
    out.matrix = d1.asDiagonal() * m * d2.asDiagonal();
    out.residual = marginal_residual(out.matrix, r, c);
    if (cfg.record_trace) out.residual_trace.push_back(out.residual);
    if (out.residual <= cfg.tolerance) {
      out.converged = true;
      break;
    }
    if (out.steps >= cfg.max_steps) break;
  }
  out.row_scales = std::move(d1);
  out.col_scales = std::move(d2);
  return out;
}

IpfResult bistochastic_fit(const ConfusionMatrix& m, double eps,
                           const IpfConfig& cfg) {
  const ConfusionMatrix s = smooth(m, eps);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.size());
  return ipf(s.entries(), ones, ones, cfg);
}

ConfusionMatrix bistochastic_normalize(const ConfusionMatrix& m, double eps,
                                       const IpfConfig& cfg) {
  IpfResult fit = bistochastic_fit(m, eps, cfg);
  if (!fit.converged) throw NonConvergenceError(std::move(fit));
  return m.with_entries(std::move(fit.matrix));
}

ConfusionMatrix bistochastic_normalize(const ConfusionMatrix& m) {
  return bistochastic_normalize(m, default_smoothing_eps(m));
}

ScalingWeights scaling_weights(const ConfusionMatrix& m, double eps,
                               const IpfConfig& cfg) {
  const ConfusionMatrix s = smooth(m, eps);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.size());
  IpfResult fit = ras(s.entries(), ones, ones, cfg);
  if (!fit.converged) throw NonConvergenceError(std::move(fit));
  return {fit.row_scales.cwiseInverse(), fit.col_scales.cwiseInverse()};
}

ConfusionMatrix apply_normalization(const ConfusionMatrix& m,
                                    NormalizationKind kind, double eps,
                                    const IpfConfig& cfg) {
  const ConfusionMatrix s = smooth(m, eps);
  switch (kind) {
    case NormalizationKind::Row:
      return row_normalize(s);
    case NormalizationKind::Col:
      return col_normalize(s);
    case NormalizationKind::All:
      return all_normalize(s);
    case NormalizationKind::Bis: {
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.size());
      IpfResult fit = ipf(s.entries(), ones, ones, cfg);
      if (!fit.converged) throw NonConvergenceError(std::move(fit));
      return m.with_entries(std::move(fit.matrix));
    }
  }
  throw ParameterError("unknown normalization kind");
}

std::vector<Eigen::MatrixXd> lemma1_oracle(const Eigen::MatrixXd& m,
                                           const Eigen::VectorXd& r,
                                           const Eigen::VectorXd& c,
                                           int samples, std::uint64_t seed) {
  if (samples < 0) throw ParameterError("sample count must be nonnegative");
  const auto n = m.rows();
  if (m.cols() != n || r.size() != n || c.size() != n) {
    throw DegenerateInputError("oracle shapes do not match");
  }
  if (!(r.array() > 0.0).all() || !(c.array() > 0.0).all()) {
    throw DomainError("target marginals must be strictly positive");
  }
  if (std::abs(r.sum() - c.sum()) > 1e-9 * r.sum()) {
    throw InfeasibleMarginalsError("row and column targets have different totals");
  }

  Rng rng(seed, kOracleStream);
  const IpfConfig tight{1e-12 * std::max(1.0, r.sum()), 200'000};
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(samples));
  std::vector<int> perm(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < samples) {
    Eigen::MatrixXd start = Eigen::MatrixXd::Zero(n, n);
    const int mixtures = static_cast<int>(n) + 1;
    for (int k = 0; k < mixtures; ++k) {
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      const double w = rng.uniform_open();
      for (Eigen::Index i = 0; i < n; ++i) start(i, perm[static_cast<std::size_t>(i)]) += w;
    }
    // Positive noise keeps the start strictly inside the polytope; its
    // magnitude varies so samples reach both the interior and near faces.
    const double noise = std::pow(10.0, rng.uniform(-3.0, 0.0));
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) start(i, j) += noise * rng.uniform_open();
    }
    IpfResult fit = ipf(start, r, c, tight);
    if (!fit.converged) continue;
    out.push_back(std::move(fit.matrix));
  }
  return out;
}

std::string ipf_diagnostics_json(const IpfResult& result) {
  nlohmann::json doc;
  doc["steps"] = result.steps;
  doc["residual"] = result.residual;
  doc["converged"] = result.converged;
  doc["row_scales"] = vec(result.row_scales);
  doc["col_scales"] = vec(result.col_scales);
  return doc.dump(2) + "\n";
}

}  // namespace bisnorm
