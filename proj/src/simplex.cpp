#include "ucdsc/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace ucdsc {

namespace {

constexpr double kInvariantTol = 1e-9;

void check_dims(const Vector& feature, const SimplexCenters& centers) {
  if (feature.size() != centers.feature_dim) {
    throw std::invalid_argument(
        "feature has dimension " + std::to_string(feature.size()) +
        ", centers expect " + std::to_string(centers.feature_dim));
  }
}

void validate_args(int num_classes, int feature_dim, double radius) {
  if (num_classes < 2) {
    throw std::invalid_argument("num_classes must be >= 2, got " +
                                std::to_string(num_classes));
  }
  if (feature_dim < num_classes - 1) {
    throw std::invalid_argument(
        "feature_dim must satisfy d >= C-1: d=" + std::to_string(feature_dim) +
        ", C=" + std::to_string(num_classes));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("radius must be positive and finite");
  }
}

}  // namespace

double SimplexDeviations::max() const {
  return std::max({equinorm, equiangular, zero_sum});
}

SimplexDeviations measure_deviations(const Matrix& vertices, double radius) {
  const auto c = vertices.rows();
  SimplexDeviations dev;
  const double target_dot = -radius * radius / static_cast<double>(c - 1);
  for (Eigen::Index i = 0; i < c; ++i) {
    dev.equinorm = std::max(
        dev.equinorm, std::abs(vertices.row(i).norm() - radius) / radius);
    for (Eigen::Index j = i + 1; j < c; ++j) {
      const double dot = vertices.row(i).dot(vertices.row(j));
      dev.equiangular = std::max(
          dev.equiangular, std::abs(dot - target_dot) / (radius * radius));
    }
  }
  dev.zero_sum = vertices.colwise().sum().norm() / radius;
  return dev;
}

SimplexCenters build_simplex(int num_classes, int feature_dim, double radius) {
  validate_args(num_classes, feature_dim, radius);
  const int c = num_classes;

  // C equiangular unit columns in R^C, all orthogonal to the ones vector.
  const double scale = std::sqrt(static_cast<double>(c) / (c - 1.0));
  Matrix frame = scale * (Matrix::Identity(c, c) -
                          Matrix::Constant(c, c, 1.0 / c));

  // Householder reflection mapping e_0 to ones/sqrt(C); its trailing C-1
  // columns are an orthonormal basis of the hyperplane the frame lives in.
  Vector ones_dir = Vector::Constant(c, 1.0 / std::sqrt(static_cast<double>(c)));
  Vector v = Vector::Unit(c, 0) - ones_dir;
  Matrix householder =
      Matrix::Identity(c, c) - (2.0 / v.squaredNorm()) * (v * v.transpose());

  SimplexCenters centers;
  centers.num_classes = c;
  centers.feature_dim = feature_dim;
  centers.radius = radius;
  centers.vertices = Matrix::Zero(c, feature_dim);
  // frame is symmetric, so row j of frame * basis is the coordinate vector
  // of column j in the basis.
  centers.vertices.leftCols(c - 1) =
      radius * (frame * householder.rightCols(c - 1));
  return centers;
}

SimplexCenters make_centers(int num_classes, int feature_dim, double radius,
                            Matrix vertices) {
  validate_args(num_classes, feature_dim, radius);
  if (vertices.rows() != num_classes || vertices.cols() != feature_dim) {
    throw std::invalid_argument("vertices must be num_classes x feature_dim");
  }
  const SimplexDeviations dev = measure_deviations(vertices, radius);
  if (dev.max() > kInvariantTol) {
    throw std::invalid_argument(
        "vertices violate simplex invariants: max relative deviation " +
        std::to_string(dev.max()));
  }
  SimplexCenters centers;
  centers.num_classes = num_classes;
  centers.feature_dim = feature_dim;
  centers.radius = radius;
  centers.vertices = std::move(vertices);
  return centers;
}

NearestCenter nearest_center(const Vector& feature,
                             const SimplexCenters& centers) {
  check_dims(feature, centers);
  NearestCenter best;
  best.index = 0;
  best.sq_dist =
      (feature.transpose() - centers.vertices.row(0)).squaredNorm();
  for (int j = 1; j < centers.num_classes; ++j) {
    const double sq =
        (feature.transpose() - centers.vertices.row(j)).squaredNorm();
    if (sq < best.sq_dist) {
      best.sq_dist = sq;
      best.index = j;
    }
  }
  return best;
}

double uncertainty_ratio(const Vector& feature,
                         const SimplexCenters& centers) {
  check_dims(feature, centers);
  const NearestCenter nearest = nearest_center(feature, centers);
  const double min_dist = std::sqrt(nearest.sq_dist);
  double sum_others = 0.0;
  for (int j = 0; j < centers.num_classes; ++j) {
    if (j == nearest.index) continue;
    sum_others += (feature.transpose() - centers.vertices.row(j)).norm();
  }
  const double mean_others = sum_others / (centers.num_classes - 1);
  if (mean_others < 1e-12) {
    throw std::runtime_error(
        "degenerate mean distance to other centers (corrupt centers?)");
  }
  // min_dist <= mean_others holds mathematically; the min guards against
  // the quotient landing one ulp above 1.
  return std::min(min_dist / mean_others, 1.0);
}

}  // namespace ucdsc
