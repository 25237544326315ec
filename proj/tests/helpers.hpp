// Shared test utilities: finite-difference gradient checking, brute-force
// metric oracles, and random-instance generators. Everything here is
// independent of the implementation paths it is used to verify.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "ucdsc/metrics.hpp"
#include "ucdsc/rng.hpp"
#include "ucdsc/types.hpp"

namespace ucdsc::testing {

// Relative error convention used everywhere: |a - b| / max(1, |a|, |b|).
inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Central finite difference of a scalar function along one coordinate of a
// matrix argument, leaving the matrix unchanged afterwards.
inline double central_diff(const std::function<double()>& eval, double& slot,
                           double step) {
  const double original = slot;
  slot = original + step;
  const double hi = eval();
  slot = original - step;
  const double lo = eval();
  slot = original;
  return (hi - lo) / (2.0 * step);
}

// Checks an analytic gradient matrix against central differences across all
// entries; returns the worst relative error.
inline double max_grad_rel_err(const std::function<double()>& eval,
                               Matrix& argument, const Matrix& analytic,
                               double step) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < argument.rows(); ++r) {
    for (Eigen::Index c = 0; c < argument.cols(); ++c) {
      const double numeric = central_diff(eval, argument(r, c), step);
      worst = std::max(worst, rel_err(numeric, analytic(r, c)));
    }
  }
  return worst;
}

// O(known * unknown) AUROC by direct pair counting, ties worth one half.
inline double auroc_pair_oracle(const std::vector<ScoredPrediction>& preds) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (const auto& k : preds) {
    if (k.truth == kUnknownLabel) continue;
    for (const auto& u : preds) {
      if (u.truth != kUnknownLabel) continue;
      ++pairs;
      if (k.score > u.score) {
        wins += 1.0;
      } else if (k.score == u.score) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

// Literal threshold enumeration for the OSCR area: for every unique score
// (plus +inf) count correct-and-accepted knowns and accepted unknowns by
// scanning the whole prediction list, then integrate trapezoidally over FPR.
inline double oscr_enumeration_oracle(
    const std::vector<ScoredPrediction>& preds) {
  std::size_t n_known = 0;
  std::size_t n_unknown = 0;
  for (const auto& p : preds) {
    if (p.truth == kUnknownLabel) {
      ++n_unknown;
    } else {
      ++n_known;
    }
  }
  std::set<double, std::greater<>> thresholds;
  for (const auto& p : preds) thresholds.insert(p.score);

  std::vector<double> fpr{0.0};
  std::vector<double> ccr{0.0};  // the +inf anchor
  for (const double threshold : thresholds) {
    std::size_t correct_accepted = 0;
    std::size_t unknown_accepted = 0;
    for (const auto& p : preds) {
      if (p.score < threshold) continue;
      if (p.truth == kUnknownLabel) {
        ++unknown_accepted;
      } else if (p.predicted == p.truth) {
        ++correct_accepted;
      }
    }
    fpr.push_back(static_cast<double>(unknown_accepted) /
                  static_cast<double>(n_unknown));
    ccr.push_back(static_cast<double>(correct_accepted) /
                  static_cast<double>(n_known));
  }
  double area = 0.0;
  for (std::size_t i = 1; i < fpr.size(); ++i) {
    area += (fpr[i] - fpr[i - 1]) * 0.5 * (ccr[i] + ccr[i - 1]);
  }
  return area;
}

// Random d x d orthogonal matrix via Householder QR with a sign fix.
inline Matrix random_orthogonal(int dim, Rng& rng) {
  Matrix gauss(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) gauss(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

// Random prediction list mixing known and unknown truths (n >= 2; the first
// entry is forced known and the last unknown so both roles always appear).
// With tie_heavy, scores come from a small discrete set so ties occur.
inline std::vector<ScoredPrediction> random_predictions(int n, int num_classes,
                                                        Rng& rng,
                                                        bool tie_heavy) {
  std::vector<ScoredPrediction> preds;
  preds.reserve(n);
  for (int i = 0; i < n; ++i) {
    ScoredPrediction p;
    p.truth = rng.uniform() < 0.5 ? static_cast<int>(rng.index(num_classes))
                                  : kUnknownLabel;
    p.predicted = static_cast<int>(rng.index(num_classes));
    p.score = tie_heavy ? static_cast<double>(rng.index(5))
                        : rng.uniform(-2.0, 2.0);
    preds.push_back(p);
  }
  preds.front().truth = static_cast<int>(rng.index(num_classes));
  preds.back().truth = kUnknownLabel;
  return preds;
}

}  // namespace ucdsc::testing
