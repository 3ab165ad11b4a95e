#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bisnorm/confusion_matrix.hpp"
#include "bisnorm/scaling.hpp"

namespace bisnorm {

// Point cloud with one (true label, predicted label) pair per row of
// `points`. Projected datasets reuse the same type with fewer columns.
struct EmbeddedDataset {
  Eigen::MatrixXd points;  // N x n
  std::vector<int> labels;
  std::vector<int> predictions;
  int classes = 0;
  std::vector<std::string> class_names;  // empty or size == classes

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  // Throws DegenerateInputError on inconsistent sizes or labels out of range.
  void validate() const;
};

struct Projection {
  Eigen::VectorXd mean;   // n
  Eigen::MatrixXd basis;  // m x n, orthonormal rows

  Eigen::Index target_dim() const { return basis.rows(); }
};

// Regular hyperrectangle grid anchored at `origin`. `extents[k]` is the
// number of cells along dimension k.
struct Grid {
  Eigen::VectorXd origin;
  Eigen::VectorXd widths;
  std::vector<std::int64_t> extents;

  double cell_volume() const { return widths.prod(); }
};

using CellIndex = std::vector<std::int64_t>;

struct ScaledHistogram {
  Grid grid;
  std::map<CellIndex, double> heights;  // absent cells have height 0
};

// Point weight is 1 / (r * l[y] * p[yhat]).
struct WeightVectors {
  Eigen::VectorXd l;
  Eigen::VectorXd p;
};

struct ClusterSelector {
  enum class By { Label, Prediction };
  By by = By::Label;
  int cls = 0;

  static ClusterSelector label(int i) { return {By::Label, i}; }
  static ClusterSelector prediction(int j) { return {By::Prediction, j}; }
};

enum class GcmVariant { AllLike, RowLike, ColLike, BisLike };

inline constexpr std::array<GcmVariant, 4> kAllGcmVariants = {
    GcmVariant::AllLike, GcmVariant::RowLike, GcmVariant::ColLike,
    GcmVariant::BisLike};

std::string_view to_string(GcmVariant v);
// Accepts "all", "row", "col", "bis".
GcmVariant parse_gcm_variant(std::string_view name);
// The normalization each variant is expected to mirror.
NormalizationKind matched_normalization(GcmVariant v);

// PCA with the top `m` principal directions; each direction is signed so its
// largest-magnitude coordinate is positive.
Projection fit_pca(const EmbeddedDataset& ds, int m);
EmbeddedDataset project(const Projection& proj, const EmbeddedDataset& ds);

// Scott's rule 3.5 * sigma_k * n^(-1/(2+m)), sigma with the n-1 denominator.
// A dimension with zero spread gets width 1 (one bin).
Eigen::VectorXd scott_bin_widths(const Eigen::MatrixXd& points);

Grid build_grid(const Eigen::MatrixXd& points, const Eigen::VectorXd& widths);
// floor((x - origin) / width) per dimension; a point on the upper edge of
// the last cell is folded into it. Throws for points outside the grid.
CellIndex cell_of(const Grid& grid, const Eigen::Ref<const Eigen::RowVectorXd>& x);

ScaledHistogram build_scaled_histogram(const EmbeddedDataset& ds,
                                       ClusterSelector cluster,
                                       const WeightVectors& w, const Grid& grid);

// r * sum of heights.
double histogram_volume(const ScaledHistogram& h);

// Geometric confusion matrix: entry (i, j) is the volume of the intersection
// of the scaled histograms of label cluster i and prediction cluster j,
//   sum_v min(sum_{y=i in v} 1/(l_y p_yhat), sum_{yhat=j in v} 1/(l_y p_yhat)).
Eigen::MatrixXd gcm(const EmbeddedDataset& ds, const Grid& grid,
                    const WeightVectors& w);

// Counts (y, yhat) pairs.
Eigen::MatrixXd count_confusion(const EmbeddedDataset& ds);
Eigen::VectorXd label_cluster_sizes(const EmbeddedDataset& ds);
Eigen::VectorXd prediction_cluster_sizes(const EmbeddedDataset& ds);

// Weighting for a variant: (1/sqrt(r), 1/sqrt(r)), (c, 1), (1, c_hat) or
// (a, b). `scaling` supplies a, b and is ignored for the other variants.
WeightVectors variant_weights(GcmVariant v, const EmbeddedDataset& ds,
                              double cell_volume, const ScalingWeights& scaling);

struct GcmVariants {
  Grid grid;
  EmbeddedDataset projected;
  ScalingWeights scaling;
  std::map<GcmVariant, Eigen::MatrixXd> matrices;
};

// Full pipeline: PCA to `m` dimensions, Scott grid, then one GCM per
// weighting. `m_counts` must equal count_confusion(ds); `eps` is the
// smoothing used for the (a, b) weights. Only the variants in `which` are
// computed; an empty cluster is an error only for variants dividing by it.
GcmVariants gcm_variants(
    const EmbeddedDataset& ds, const ConfusionMatrix& m_counts, int m, double eps,
    const IpfConfig& cfg = {},
    const std::vector<GcmVariant>& which = {kAllGcmVariants.begin(),
                                            kAllGcmVariants.end()});

}  // namespace bisnorm
