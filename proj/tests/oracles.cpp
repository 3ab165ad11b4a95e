#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace oracle {

double i_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& m) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double x = p(i, j);
      const double y = m(i, j);
      total += (x > 0.0 ? x * std::log(x / y) : 0.0) - x + y;
    }
  }
  return total;
}

double bis2x2_grid_search(const Eigen::Matrix2d& m, int points) {
  double best_p = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= points; ++k) {
    const double p = static_cast<double>(k) / (points + 1);
    Eigen::MatrixXd cand(2, 2);
    cand << p, 1.0 - p, 1.0 - p, p;
    const double v = i_divergence(cand, m);
    if (v < best) {
      best = v;
      best_p = p;
    }
  }
  return best_p;
}

double overlap(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  const double sp = p.sum();
  const double sq = q.sum();
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) total += std::min(p(i, j) / sp, q(i, j) / sq);
  }
  return total;
}

double l1(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  const double sp = p.sum();
  const double sq = q.sum();
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) total += std::abs(p(i, j) / sp - q(i, j) / sq);
  }
  return total;
}

double point_sum_volume(const std::vector<int>& labels, const std::vector<int>& predictions,
                        const Eigen::VectorXd& l, const Eigen::VectorXd& p, bool by_label,
                        int cls) {
  double total = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const int key = by_label ? labels[k] : predictions[k];
    if (key == cls) total += 1.0 / (l(labels[k]) * p(predictions[k]));
  }
  return total;
}

Eigen::MatrixXd gcm_bruteforce(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                               const std::vector<int>& predictions, int classes,
                               const Eigen::VectorXd& origin, const Eigen::VectorXd& widths,
                               const std::vector<std::int64_t>& extents,
                               const Eigen::VectorXd& l, const Eigen::VectorXd& p) {
  // cell -> (per-label mass, per-prediction mass)
  std::map<std::vector<std::int64_t>, std::pair<std::vector<double>, std::vector<double>>> cells;
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    std::vector<std::int64_t> key;
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
      auto c = static_cast<std::int64_t>(std::floor((points(k, d) - origin(d)) / widths(d)));
      c = std::clamp<std::int64_t>(c, 0, extents[static_cast<std::size_t>(d)] - 1);
      key.push_back(c);
    }
    auto& cell = cells[key];
    if (cell.first.empty()) {
      cell.first.assign(static_cast<std::size_t>(classes), 0.0);
      cell.second.assign(static_cast<std::size_t>(classes), 0.0);
    }
    const int y = labels[static_cast<std::size_t>(k)];
    const int yh = predictions[static_cast<std::size_t>(k)];
    const double w = 1.0 / (l(y) * p(yh));
    cell.first[static_cast<std::size_t>(y)] += w;
    cell.second[static_cast<std::size_t>(yh)] += w;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(classes, classes);
  for (const auto& [key, masses] : cells) {
    for (int i = 0; i < classes; ++i) {
      for (int j = 0; j < classes; ++j) {
        out(i, j) += std::min(masses.first[static_cast<std::size_t>(i)],
                              masses.second[static_cast<std::size_t>(j)]);
      }
    }
  }
  return out;
}

double sample_sd(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  double ss = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) ss += (x(i) - mean) * (x(i) - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace oracle
