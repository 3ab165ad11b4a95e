#include "bisnorm/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "bisnorm/errors.hpp"

namespace bisnorm {
namespace {

void require_positive(const Eigen::VectorXd& x, const char* what) {
  if (!(x.array() > 0.0).all() || !x.allFinite()) {
    throw ParameterError(std::string(what) + " must be strictly positive");
  }
}

// Sum of 1/(l_y p_yhat) per cell, split by label and by prediction.
struct CellMass {
  Eigen::VectorXd by_label;
  Eigen::VectorXd by_prediction;
};

std::map<CellIndex, CellMass> cell_masses(const EmbeddedDataset& ds, const Grid& grid,
                                          const WeightVectors& w) {
  std::map<CellIndex, CellMass> cells;
  for (Eigen::Index k = 0; k < ds.size(); ++k) {
    const auto y = static_cast<std::size_t>(k);
    const int label = ds.labels[y];
    const int pred = ds.predictions[y];
    const double mass = 1.0 / (w.l[label] * w.p[pred]);
    auto [it, inserted] = cells.try_emplace(cell_of(grid, ds.points.row(k)));
    if (inserted) {
      it->second.by_label = Eigen::VectorXd::Zero(ds.classes);
      it->second.by_prediction = Eigen::VectorXd::Zero(ds.classes);
    }
    it->second.by_label[label] += mass;
    it->second.by_prediction[pred] += mass;
  }
  return cells;
}

}  // namespace

void EmbeddedDataset::validate() const {
  const auto n = static_cast<std::size_t>(points.rows());
  if (labels.size() != n || predictions.size() != n) {
    throw DegenerateInputError("label/prediction count does not match point count");
  }
  if (classes < 2) throw DegenerateInputError("dataset needs at least 2 classes");
  if (!class_names.empty() && static_cast<int>(class_names.size()) != classes) {
    throw DegenerateInputError("class name count does not match class count");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] < 0 || labels[k] >= classes || predictions[k] < 0 ||
        predictions[k] >= classes) {
      throw DegenerateInputError("label or prediction out of range");
    }
  }
  if (!points.allFinite()) throw DegenerateInputError("non-finite embedding coordinate");
}

std::string_view to_string(GcmVariant v) {
  switch (v) {
    case GcmVariant::AllLike:
      return "all";
    case GcmVariant::RowLike:
      return "row";
    case GcmVariant::ColLike:
      return "col";
    case GcmVariant::BisLike:
      return "bis";
  }
  return "?";
}

GcmVariant parse_gcm_variant(std::string_view name) {
  for (auto v : kAllGcmVariants) {
    if (to_string(v) == name) return v;
  }
  throw ParameterError("unknown GCM variant: " + std::string(name));
}

NormalizationKind matched_normalization(GcmVariant v) {
  switch (v) {
    case GcmVariant::AllLike:
      return NormalizationKind::All;
    case GcmVariant::RowLike:
      return NormalizationKind::Row;
    case GcmVariant::ColLike:
      return NormalizationKind::Col;
    case GcmVariant::BisLike:
      return NormalizationKind::Bis;
  }
  return NormalizationKind::All;
}

Projection fit_pca(const EmbeddedDataset& ds, int m) {
  const Eigen::Index n = ds.dim();
  if (m < 1 || m > n) {
    throw ParameterError("projection dimension must lie in [1, " + std::to_string(n) + "]");
  }
  if (ds.size() < 2) throw DegenerateInputError("PCA needs at least 2 points");

  Projection proj;
  proj.mean = ds.points.colwise().mean().transpose();
  const Eigen::MatrixXd centered = ds.points.rowwise() - proj.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(ds.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

  // Eigenvalues come back ascending.
  proj.basis.resize(m, n);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd dir = eig.eigenvectors().col(n - 1 - k);
    Eigen::Index arg = 0;
    dir.cwiseAbs().maxCoeff(&arg);
    if (dir[arg] < 0.0) dir = -dir;
    proj.basis.row(k) = dir.transpose();
  }
  return proj;
}

EmbeddedDataset project(const Projection& proj, const EmbeddedDataset& ds) {
  if (proj.basis.cols() != ds.dim() || proj.mean.size() != ds.dim()) {
    throw DegenerateInputError("projection dimension does not match dataset");
  }
  EmbeddedDataset out;
  out.points = (ds.points.rowwise() - proj.mean.transpose()) * proj.basis.transpose();
  out.labels = ds.labels;
  out.predictions = ds.predictions;
  out.classes = ds.classes;
  out.class_names = ds.class_names;
  return out;
}

Eigen::VectorXd scott_bin_widths(const Eigen::MatrixXd& points) {
  const Eigen::Index count = points.rows();
  const Eigen::Index m = points.cols();
  if (count < 2) throw DegenerateInputError("bin widths need at least 2 points");
  const double factor =
      3.5 * std::pow(static_cast<double>(count), -1.0 / (2.0 + static_cast<double>(m)));
  Eigen::VectorXd widths(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto col = points.col(k);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(count - 1);
    const double sigma = std::sqrt(var);
    widths[k] = sigma > 0.0 ? factor * sigma : 1.0;
  }
  return widths;
}

Grid build_grid(const Eigen::MatrixXd& points, const Eigen::VectorXd& widths) {
  if (points.rows() == 0) throw DegenerateInputError("grid needs at least one point");
  if (widths.size() != points.cols()) {
    throw DegenerateInputError("width count does not match point dimension");
  }
  require_positive(widths, "bin widths");
  Grid grid;
  grid.origin = points.colwise().minCoeff().transpose();
  grid.widths = widths;
  const Eigen::VectorXd top = points.colwise().maxCoeff().transpose();
  grid.extents.resize(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const double span = std::ceil((top[k] - grid.origin[k]) / widths[k]);
    grid.extents[static_cast<std::size_t>(k)] =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(span));
  }
  return grid;
}

CellIndex cell_of(const Grid& grid, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != grid.origin.size()) {
    throw DegenerateInputError("point dimension does not match grid");
  }
  CellIndex idx(static_cast<std::size_t>(x.size()));
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const auto extent = grid.extents[static_cast<std::size_t>(k)];
    auto c = static_cast<std::int64_t>(std::floor((x[k] - grid.origin[k]) / grid.widths[k]));
    if (c == extent) c = extent - 1;
    if (c < 0 || c >= extent) throw DegenerateInputError("point lies outside the grid");
    idx[static_cast<std::size_t>(k)] = c;
  }
  return idx;
}

ScaledHistogram build_scaled_histogram(const EmbeddedDataset& ds,
                                       ClusterSelector cluster,
                                       const WeightVectors& w, const Grid& grid) {
  if (cluster.cls < 0 || cluster.cls >= ds.classes) {
    throw ParameterError("cluster class out of range");
  }
  if (w.l.size() != ds.classes || w.p.size() != ds.classes) {
    throw DegenerateInputError("weight vectors must have one entry per class");
  }
  require_positive(w.l, "weights l");
  require_positive(w.p, "weights p");
  ScaledHistogram h{grid, {}};
  const double r = grid.cell_volume();
  const auto& members =
      cluster.by == ClusterSelector::By::Label ? ds.labels : ds.predictions;
  for (Eigen::Index k = 0; k < ds.size(); ++k) {
    const auto s = static_cast<std::size_t>(k);
    if (members[s] != cluster.cls) continue;
    h.heights[cell_of(grid, ds.points.row(k))] +=
        1.0 / (r * w.l[ds.labels[s]] * w.p[ds.predictions[s]]);
  }
  return h;
}

double histogram_volume(const ScaledHistogram& h) {
  double sum = 0.0;
  for (const auto& [cell, height] : h.heights) sum += height;
  return h.grid.cell_volume() * sum;
}

Eigen::MatrixXd gcm(const EmbeddedDataset& ds, const Grid& grid, const WeightVectors& w) {
  if (w.l.size() != ds.classes || w.p.size() != ds.classes) {
    throw DegenerateInputError("weight vectors must have one entry per class");
  }
  require_positive(w.l, "weights l");
  require_positive(w.p, "weights p");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ds.classes, ds.classes);
  for (const auto& [cell, mass] : cell_masses(ds, grid, w)) {
    for (int i = 0; i < ds.classes; ++i) {
      const double a = mass.by_label[i];
      if (a == 0.0) continue;
      for (int j = 0; j < ds.classes; ++j) {
        const double b = mass.by_prediction[j];
        if (b != 0.0) out(i, j) += std::min(a, b);
      }
    }
  }
  return out;
}

Eigen::MatrixXd count_confusion(const EmbeddedDataset& ds) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ds.classes, ds.classes);
  for (std::size_t k = 0; k < ds.labels.size(); ++k) {
    m(ds.labels[k], ds.predictions[k]) += 1.0;
  }
  return m;
}

Eigen::VectorXd label_cluster_sizes(const EmbeddedDataset& ds) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ds.classes);
  for (int y : ds.labels) c[y] += 1.0;
  return c;
}

Eigen::VectorXd prediction_cluster_sizes(const EmbeddedDataset& ds) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ds.classes);
  for (int y : ds.predictions) c[y] += 1.0;
  return c;
}

WeightVectors variant_weights(GcmVariant v, const EmbeddedDataset& ds,
                              double cell_volume, const ScalingWeights& scaling) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.classes);
  switch (v) {
    case GcmVariant::AllLike: {
      const Eigen::VectorXd s = ones / std::sqrt(cell_volume);
      return {s, s};
    }
    case GcmVariant::RowLike: {
      Eigen::VectorXd c = label_cluster_sizes(ds);
      if ((c.array() <= 0.0).any()) {
        throw DegenerateInputError("row-like GCM needs every label cluster nonempty");
      }
      return {std::move(c), ones};
    }
    case GcmVariant::ColLike: {
      Eigen::VectorXd c = prediction_cluster_sizes(ds);
      if ((c.array() <= 0.0).any()) {
        throw DegenerateInputError("col-like GCM needs every prediction cluster nonempty");
      }
      return {ones, std::move(c)};
    }
    case GcmVariant::BisLike:
      return {scaling.a, scaling.b};
  }
  throw ParameterError("unknown GCM variant");
}

GcmVariants gcm_variants(const EmbeddedDataset& ds, const ConfusionMatrix& m_counts,
                         int m, double eps, const IpfConfig& cfg,
                         const std::vector<GcmVariant>& which) {
  ds.validate();
  if (m_counts.size() != ds.classes ||
      !(m_counts.entries().array() == count_confusion(ds).array()).all()) {
    throw DegenerateInputError("confusion matrix does not match the dataset's (y, yhat) counts");
  }
  GcmVariants out;
  out.projected = project(fit_pca(ds, m), ds);
  out.grid = build_grid(out.projected.points, scott_bin_widths(out.projected.points));
  const bool need_bis = std::find(which.begin(), which.end(), GcmVariant::BisLike) != which.end();
  if (need_bis) {
    if ((label_cluster_sizes(ds).array() <= 0.0).any() ||
        (prediction_cluster_sizes(ds).array() <= 0.0).any()) {
      throw DegenerateInputError("bis-like GCM needs every label and prediction cluster nonempty");
    }
    out.scaling = scaling_weights(m_counts, eps, cfg);
  }
  const double r = out.grid.cell_volume();
  for (auto v : which) {
    out.matrices[v] = gcm(out.projected, out.grid, variant_weights(v, ds, r, out.scaling));
  }
  return out;
}

}  // namespace bisnorm
