#include "ucdsc/losses.hpp"

#include <cmath>
#include <string>

namespace ucdsc {

namespace {

constexpr double kDegenerateDist = 1e-12;

void check_batch(const FeatureBatch& batch, const SimplexCenters& centers) {
  if (batch.features.rows() < 1) {
    throw std::invalid_argument("feature batch is empty");
  }
  if (batch.features.cols() != centers.feature_dim) {
    throw std::invalid_argument(
        "feature width " + std::to_string(batch.features.cols()) +
        " does not match centers dimension " +
        std::to_string(centers.feature_dim));
  }
  if (static_cast<Eigen::Index>(batch.labels.size()) != batch.features.rows()) {
    throw std::invalid_argument("label count does not match batch size");
  }
  for (const int label : batch.labels) {
    if (label < 0 || label >= centers.num_classes) {
      throw std::invalid_argument("label " + std::to_string(label) +
                                  " outside [0, " +
                                  std::to_string(centers.num_classes) + ")");
    }
  }
}

void check_weights(const LossWeights& w) {
  for (const double v : {w.lambda_o, w.lambda_u, w.margin}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(
          "loss weights and margin must be finite and >= 0");
    }
  }
}

}  // namespace

LossValue intra_loss(const FeatureBatch& batch, const SimplexCenters& centers) {
  check_batch(batch, centers);
  const Eigen::Index n = batch.features.rows();
  Matrix diff(n, centers.feature_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    diff.row(i) = batch.features.row(i) - centers.vertices.row(batch.labels[i]);
  }
  LossValue out;
  out.value = diff.squaredNorm() / static_cast<double>(n);
  out.grad_features = (2.0 / static_cast<double>(n)) * diff;
  return out;
}

LossValue outlier_loss(const FeatureBatch& batch, const Matrix& background,
                       const SimplexCenters& centers, double margin) {
  check_batch(batch, centers);
  if (!std::isfinite(margin) || margin < 0.0) {
    throw std::invalid_argument("margin must be finite and >= 0");
  }
  if (background.rows() < 1) {
    throw std::invalid_argument("background batch is empty");
  }
  if (background.cols() != centers.feature_dim) {
    throw std::invalid_argument("background width does not match centers");
  }

  const Eigen::Index n = batch.features.rows();
  const Eigen::Index k = background.rows();
  const int c = centers.num_classes;

  // Squared distance of every background sample to every center; only the
  // labels present matter but C is small.
  Matrix bg_sq(k, c);
  for (Eigen::Index b = 0; b < k; ++b) {
    for (int j = 0; j < c; ++j) {
      bg_sq(b, j) =
          (background.row(b) - centers.vertices.row(j)).squaredNorm();
    }
  }

  Matrix diff(n, centers.feature_dim);
  Vector own_sq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    diff.row(i) = batch.features.row(i) - centers.vertices.row(batch.labels[i]);
    own_sq(i) = diff.row(i).squaredNorm();
  }

  LossValue out;
  out.grad_features = Matrix::Zero(n, centers.feature_dim);
  out.grad_background = Matrix::Zero(k, centers.feature_dim);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = batch.labels[i];
    for (Eigen::Index b = 0; b < k; ++b) {
      const double arg = margin + own_sq(i) - bg_sq(b, label);
      if (arg > 0.0) {
        sum += arg;
        out.grad_features.row(i) += 2.0 * diff.row(i);
        out.grad_background->row(b) -=
            2.0 * (background.row(b) - centers.vertices.row(label));
      }
    }
  }
  const double inv = 1.0 / (static_cast<double>(n) * static_cast<double>(k));
  out.value = sum * inv;
  out.grad_features *= inv;
  *out.grad_background *= inv;
  return out;
}

LossValue uncertainty_loss(const FeatureBatch& batch,
                           const SimplexCenters& centers) {
  check_batch(batch, centers);
  const Eigen::Index n = batch.features.rows();
  const int c = centers.num_classes;
  const double inv_n = 1.0 / static_cast<double>(n);

  LossValue out;
  out.grad_features = Matrix::Zero(n, centers.feature_dim);
  double sum = 0.0;
  Vector dist(c);
  for (Eigen::Index i = 0; i < n; ++i) {
    int nearest = 0;
    for (int j = 0; j < c; ++j) {
      dist(j) = (batch.features.row(i) - centers.vertices.row(j)).norm();
      if (dist(j) < dist(nearest)) nearest = j;
    }
    const double a = dist(nearest);
    double sum_others = 0.0;
    for (int j = 0; j < c; ++j) {
      if (j != nearest) sum_others += dist(j);
    }
    const double b = sum_others / (c - 1);
    if (b < kDegenerateDist) {
      throw std::runtime_error(
          "degenerate mean distance to other centers (corrupt centers?)");
    }
    sum += std::min(a / b, 1.0);

    // d(a/b) = (da * b - a * db) / b^2, nearest index held fixed.
    Vector grad_a = Vector::Zero(centers.feature_dim);
    if (a >= kDegenerateDist) {
      grad_a = (batch.features.row(i) - centers.vertices.row(nearest))
                   .transpose() /
               a;
    }
    Vector grad_b = Vector::Zero(centers.feature_dim);
    for (int j = 0; j < c; ++j) {
      if (j == nearest || dist(j) < kDegenerateDist) continue;
      grad_b += (batch.features.row(i) - centers.vertices.row(j)).transpose() /
                dist(j);
    }
    grad_b /= static_cast<double>(c - 1);
    out.grad_features.row(i) =
        inv_n * ((grad_a * b - a * grad_b) / (b * b)).transpose();
  }
  out.value = sum * inv_n;
  return out;
}

LossValue total_loss(const FeatureBatch& batch, const Matrix& background,
                     const SimplexCenters& centers, const LossWeights& weights,
                     LossTerms* terms) {
  check_weights(weights);
  if (weights.lambda_o > 0.0 && background.rows() < 1) {
    throw std::invalid_argument(
        "background batch required when lambda_o > 0");
  }

  LossValue out = intra_loss(batch, centers);
  LossTerms split;
  split.intra = out.value;

  if (weights.lambda_o > 0.0) {
    LossValue o = outlier_loss(batch, background, centers, weights.margin);
    split.outlier = o.value;
    out.value += weights.lambda_o * o.value;
    out.grad_features += weights.lambda_o * o.grad_features;
    out.grad_background = weights.lambda_o * (*o.grad_background);
  } else if (background.rows() > 0) {
    out.grad_background =
        Matrix::Zero(background.rows(), centers.feature_dim);
  }

  if (weights.lambda_u > 0.0) {
    LossValue u = uncertainty_loss(batch, centers);
    split.uncertainty = u.value;
    out.value += weights.lambda_u * u.value;
    out.grad_features += weights.lambda_u * u.grad_features;
  }

  if (terms != nullptr) *terms = split;
  return out;
}

}  // namespace ucdsc
