#pragma once

#include <optional>
#include <vector>

#include "ucdsc/simplex.hpp"
#include "ucdsc/types.hpp"

namespace ucdsc {

// A mini-batch of embedded known samples: row i of features is f_i with
// class label labels[i] in [0, C).
struct FeatureBatch {
  Matrix features;          // n x d
  std::vector<int> labels;  // n entries
};

// Coefficients of the combined objective: total = intra + lambda_o * outlier
// + lambda_u * uncertainty, with the hinge margin used by the outlier term.
struct LossWeights {
  double lambda_o = 1.0;
  double lambda_u = 5.0;
  double margin = 38.0;
};

// A scalar loss with its analytic gradients. grad_background is present only
// when a background batch participated.
struct LossValue {
  double value = 0.0;
  Matrix grad_features;                   // n x d
  std::optional<Matrix> grad_background;  // K x d
};

// Split of the combined loss into its three terms (pre-weighting).
struct LossTerms {
  double intra = 0.0;
  double outlier = 0.0;
  double uncertainty = 0.0;
};

// Mean squared distance of each feature to its class center:
// (1/n) sum_i ||f_i - s_{y_i}||^2. Gradient row i is (2/n)(f_i - s_{y_i}).
LossValue intra_loss(const FeatureBatch& batch, const SimplexCenters& centers);

// Margin hinge over all known/background pairs, normalized by n*K:
// (1/(nK)) sum_i sum_k max(0, m + ||f_i - s_{y_i}||^2 - ||bg_k - s_{y_i}||^2).
// Exact subgradients; a hinge argument of exactly zero contributes nothing.
LossValue outlier_loss(const FeatureBatch& batch, const Matrix& background,
                       const SimplexCenters& centers, double margin);

// Mean uncertainty ratio over the batch; see uncertainty_ratio. The nearest
// index is held fixed when differentiating (the ratio is piecewise smooth),
// and the numerator direction is zeroed when a feature sits on a center.
LossValue uncertainty_loss(const FeatureBatch& batch,
                           const SimplexCenters& centers);

// Weighted sum of the three terms. The background batch may be empty only
// when lambda_o is zero. When `terms` is non-null it receives the three
// unweighted component values.
LossValue total_loss(const FeatureBatch& batch, const Matrix& background,
                     const SimplexCenters& centers, const LossWeights& weights,
                     LossTerms* terms = nullptr);

}  // namespace ucdsc
