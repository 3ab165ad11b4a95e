#include "bisnorm/confusion_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bisnorm/errors.hpp"

namespace bisnorm {
namespace {

std::vector<std::string> default_labels(Eigen::Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DegenerateInputError("matrix shapes differ");
  }
}

Eigen::MatrixXd zero_diagonal(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  out.diagonal().setZero();
  return out;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(Eigen::MatrixXd entries)
    : ConfusionMatrix(entries, default_labels(entries.rows())) {}

ConfusionMatrix::ConfusionMatrix(Eigen::MatrixXd entries,
                                 std::vector<std::string> labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.rows() != entries_.cols()) {
    throw DegenerateInputError("confusion matrix must be square");
  }
  if (entries_.rows() < 2) {
    throw DegenerateInputError("confusion matrix needs at least 2 classes");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != entries_.rows()) {
    throw DegenerateInputError("label count does not match matrix size");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() !=
      labels_.size()) {
    throw DegenerateInputError("labels must be unique");
  }
  if (!entries_.allFinite()) {
    throw DegenerateInputError("confusion matrix has non-finite entries");
  }
  if ((entries_.array() < 0.0).any()) {
    throw DegenerateInputError("confusion matrix has negative entries");
  }
  if (!(entries_.sum() > 0.0)) {
    throw DegenerateInputError("confusion matrix has zero total mass");
  }
}

ConfusionMatrix ConfusionMatrix::with_entries(Eigen::MatrixXd entries) const {
  return ConfusionMatrix(std::move(entries), labels_);
}

ConfusionMatrix ConfusionMatrix::transposed() const {
  return ConfusionMatrix(entries_.transpose(), labels_);
}

std::string_view to_string(NormalizationKind kind) {
  switch (kind) {
    case NormalizationKind::Row:
      return "row";
    case NormalizationKind::Col:
      return "col";
    case NormalizationKind::All:
      return "all";
    case NormalizationKind::Bis:
      return "bis";
  }
  return "?";
}

NormalizationKind parse_normalization_kind(std::string_view name) {
  for (auto kind : kAllNormalizationKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw ParameterError("unknown normalization kind: " + std::string(name));
}

double default_smoothing_eps(const ConfusionMatrix& m) {
  const double c = m.size();
  return std::max(1e-6 * m.total() / (c * c), 1e-12);
}

ConfusionMatrix smooth(const ConfusionMatrix& m, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ParameterError("smoothing eps must be positive");
  }
  return m.with_entries(m.entries().array() + eps);
}

ConfusionMatrix row_normalize(const ConfusionMatrix& m) {
  const Eigen::VectorXd sums = m.row_sums();
  if ((sums.array() <= 0.0).any()) {
    throw DegenerateInputError("row_normalize: zero row (smooth first)");
  }
  return m.with_entries(sums.cwiseInverse().asDiagonal() * m.entries());
}

ConfusionMatrix col_normalize(const ConfusionMatrix& m) {
  const Eigen::VectorXd sums = m.col_sums();
  if ((sums.array() <= 0.0).any()) {
    throw DegenerateInputError("col_normalize: zero column (smooth first)");
  }
  return m.with_entries(m.entries() * sums.cwiseInverse().asDiagonal());
}

ConfusionMatrix all_normalize(const ConfusionMatrix& m) {
  // The constructor already guarantees a positive total.
  return m.with_entries(m.entries() / m.total());
}

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& m) {
  require_same_shape(p, m);
  if (!((m.array() > 0.0).all())) {
    throw DomainError("kl_divergence: reference matrix must be positive");
  }
  if ((p.array() < 0.0).any()) {
    throw DomainError("kl_divergence: first argument must be nonnegative");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double pij = p(i, j);
      const double mij = m(i, j);
      if (pij > 0.0) sum += pij * std::log(pij / mij) - pij;
      sum += mij;
    }
  }
  return sum;
}

double kl_divergence(const ConfusionMatrix& p, const ConfusionMatrix& m) {
  return kl_divergence(p.entries(), m.entries());
}

double overlap(const ConfusionMatrix& p, const ConfusionMatrix& q) {
  require_same_shape(p.entries(), q.entries());
  const Eigen::MatrixXd a = p.entries() / p.total();
  const Eigen::MatrixXd b = q.entries() / q.total();
  return a.cwiseMin(b).sum();
}

std::optional<double> offdiag_overlap(const ConfusionMatrix& p,
                                      const ConfusionMatrix& q) {
  require_same_shape(p.entries(), q.entries());
  const Eigen::MatrixXd a = zero_diagonal(p.entries());
  const Eigen::MatrixXd b = zero_diagonal(q.entries());
  const double sa = a.sum();
  const double sb = b.sum();
  if (!(sa > 0.0) || !(sb > 0.0)) return std::nullopt;
  return (a / sa).cwiseMin(b / sb).sum();
}

double l1_distance(const ConfusionMatrix& p, const ConfusionMatrix& q) {
  require_same_shape(p.entries(), q.entries());
  const Eigen::MatrixXd a = p.entries() / p.total();
  const Eigen::MatrixXd b = q.entries() / q.total();
  return (a - b).cwiseAbs().sum();
}

}  // namespace bisnorm
