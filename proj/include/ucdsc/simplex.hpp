#pragma once

#include "ucdsc/types.hpp"

namespace ucdsc {

// The fixed class centers: C points on the radius-r hypersphere in R^d
// forming a regular simplex. Immutable after construction; all pairwise
// inner products equal -r^2/(C-1) and the points sum to zero.
struct SimplexCenters {
  int num_classes = 0;
  int feature_dim = 0;
  double radius = 0.0;
  Matrix vertices;  // num_classes x feature_dim, row j is center s_j
};

// Worst-case deviations from the simplex invariants, all relative to the
// radius scale. Used by validation and the simplex-check command.
struct SimplexDeviations {
  double equinorm = 0.0;      // max_j | ||s_j|| - r | / r
  double equiangular = 0.0;   // max_{i!=j} | <s_i,s_j> + r^2/(C-1) | / r^2
  double zero_sum = 0.0;      // || sum_j s_j || / r
  double max() const;
};

SimplexDeviations measure_deviations(const Matrix& vertices, double radius);

// Builds the canonical regular simplex: the C columns of
// sqrt(C/(C-1)) * (I - J/C) are unit-norm with mutual cosine -1/(C-1) and
// lie in the hyperplane orthogonal to the all-ones vector; they are mapped
// to R^(C-1) through the trailing columns of the Householder reflection
// taking e_0 to ones/sqrt(C), zero-padded to d coordinates, and scaled by
// the radius. Deterministic: identical inputs give bit-identical vertices.
SimplexCenters build_simplex(int num_classes, int feature_dim, double radius);

// Wraps externally supplied vertices (deserialization, rotated copies).
// Throws std::invalid_argument unless all simplex invariants hold within
// relative tolerance 1e-9.
SimplexCenters make_centers(int num_classes, int feature_dim, double radius,
                            Matrix vertices);

struct NearestCenter {
  int index = 0;
  double sq_dist = 0.0;
};

// Index of the closest center and the squared distance to it.
// Ties break toward the lowest class index.
NearestCenter nearest_center(const Vector& feature,
                             const SimplexCenters& centers);

// Ratio of the distance to the nearest center over the mean distance to all
// other centers. 0 exactly at a center, 1 at the centroid; always in [0,1].
// Throws std::runtime_error if the mean other-distance degenerates below
// 1e-12, which signals corrupt centers.
double uncertainty_ratio(const Vector& feature, const SimplexCenters& centers);

}  // namespace ucdsc
