#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bisnorm {

// Square nonnegative matrix with positive total mass. Rows index the true
// class, columns the predicted class; both share one label list.
class ConfusionMatrix {
 public:
  // Labels default to "0", "1", ... when none are given.
  explicit ConfusionMatrix(Eigen::MatrixXd entries);
  ConfusionMatrix(Eigen::MatrixXd entries, std::vector<std::string> labels);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const std::vector<std::string>& labels() const { return labels_; }

  double operator()(int i, int j) const { return entries_(i, j); }
  double total() const { return entries_.sum(); }
  Eigen::VectorXd row_sums() const { return entries_.rowwise().sum(); }
  Eigen::VectorXd col_sums() const { return entries_.colwise().sum().transpose(); }

  // Same labels, new entries (validated).
  ConfusionMatrix with_entries(Eigen::MatrixXd entries) const;
  ConfusionMatrix transposed() const;

 private:
  Eigen::MatrixXd entries_;
  std::vector<std::string> labels_;
};

enum class NormalizationKind { Row, Col, All, Bis };

inline constexpr std::array<NormalizationKind, 4> kAllNormalizationKinds = {
    NormalizationKind::Row, NormalizationKind::Col, NormalizationKind::All,
    NormalizationKind::Bis};

std::string_view to_string(NormalizationKind kind);
// Accepts "row", "col", "all", "bis"; throws ParameterError otherwise.
NormalizationKind parse_normalization_kind(std::string_view name);

// 1e-6 * M_++ / C^2, floored at 1e-12.
double default_smoothing_eps(const ConfusionMatrix& m);

ConfusionMatrix smooth(const ConfusionMatrix& m, double eps);

ConfusionMatrix row_normalize(const ConfusionMatrix& m);
ConfusionMatrix col_normalize(const ConfusionMatrix& m);
ConfusionMatrix all_normalize(const ConfusionMatrix& m);

// Generalized I-divergence sum[P ln(P/M) - P + M] with 0 ln 0 = 0.
// Requires equal shapes and strictly positive `m`.
double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& m);
double kl_divergence(const ConfusionMatrix& p, const ConfusionMatrix& m);

// sum_ij min(all(P)_ij, all(Q)_ij).
double overlap(const ConfusionMatrix& p, const ConfusionMatrix& q);

// Overlap of the off-diagonal parts. Empty when either off-diagonal part
// carries no mass, since all() is then undefined.
std::optional<double> offdiag_overlap(const ConfusionMatrix& p,
                                      const ConfusionMatrix& q);

// ||all(P) - all(Q)||_1.
double l1_distance(const ConfusionMatrix& p, const ConfusionMatrix& q);

}  // namespace bisnorm
