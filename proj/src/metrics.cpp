#include "ucdsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ucdsc {

namespace {

struct KnownUnknownCounts {
  std::size_t known = 0;
  std::size_t unknown = 0;
};

KnownUnknownCounts count_roles(const std::vector<ScoredPrediction>& preds,
                               const char* caller) {
  KnownUnknownCounts counts;
  for (const auto& p : preds) {
    if (std::isnan(p.score)) {
      throw std::invalid_argument(std::string(caller) +
                                  ": scores must not be NaN");
    }
    if (p.truth == kUnknownLabel) {
      ++counts.unknown;
    } else {
      ++counts.known;
    }
  }
  if (counts.known == 0) {
    throw std::invalid_argument(std::string(caller) +
                                ": no known samples present");
  }
  if (counts.unknown == 0) {
    throw std::invalid_argument(std::string(caller) +
                                ": no unknown samples present");
  }
  return counts;
}

std::vector<std::size_t> order_by_score_desc(
    const std::vector<ScoredPrediction>& preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&preds](std::size_t a, std::size_t b) {
                     return preds[a].score > preds[b].score;
                   });
  return order;
}

double trapezoid_area(const std::vector<CurvePoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].x - curve[i - 1].x) * 0.5 *
            (curve[i].y + curve[i - 1].y);
  }
  return area;
}

// Shared walk for OSCR and ROC: emit one point per unique score threshold,
// counting how many samples at or above it satisfy the accept predicates.
template <class CountY>
std::vector<CurvePoint> sweep_thresholds(
    const std::vector<ScoredPrediction>& preds,
    const KnownUnknownCounts& counts, CountY hits_y) {
  const auto order = order_by_score_desc(preds);
  std::vector<CurvePoint> curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t unknown_at_or_above = 0;
  std::size_t y_at_or_above = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = preds[order[i]].score;
    std::size_t j = i;
    while (j < order.size() && preds[order[j]].score == threshold) {
      const auto& p = preds[order[j]];
      if (p.truth == kUnknownLabel) {
        ++unknown_at_or_above;
      } else if (hits_y(p)) {
        ++y_at_or_above;
      }
      ++j;
    }
    curve.push_back(
        {threshold,
         static_cast<double>(unknown_at_or_above) /
             static_cast<double>(counts.unknown),
         static_cast<double>(y_at_or_above) /
             static_cast<double>(counts.known)});
    i = j;
  }
  return curve;
}

}  // namespace

ScoreMode score_mode_from_string(const std::string& name) {
  if (name == "neg_min_dist") return ScoreMode::kNegMinDist;
  if (name == "one_minus_u") return ScoreMode::kOneMinusU;
  throw std::invalid_argument("unknown score mode '" + name +
                              "' (expected neg_min_dist or one_minus_u)");
}

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::kNegMinDist ? "neg_min_dist" : "one_minus_u";
}

std::vector<ScoredPrediction> score_samples(const Matrix& features,
                                            const SimplexCenters& centers,
                                            ScoreMode mode,
                                            const std::vector<int>& truths) {
  if (features.cols() != centers.feature_dim) {
    throw std::invalid_argument("feature width does not match centers");
  }
  if (!truths.empty() &&
      static_cast<Eigen::Index>(truths.size()) != features.rows()) {
    throw std::invalid_argument("truths must be empty or one per row");
  }
  std::vector<ScoredPrediction> preds;
  preds.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Vector f = features.row(i).transpose();
    const NearestCenter nearest = nearest_center(f, centers);
    ScoredPrediction p;
    p.predicted = nearest.index;
    p.score = mode == ScoreMode::kNegMinDist
                  ? -nearest.sq_dist
                  : 1.0 - uncertainty_ratio(f, centers);
    p.truth = truths.empty() ? kUnknownLabel
                             : truths[static_cast<std::size_t>(i)];
    preds.push_back(p);
  }
  return preds;
}

double closed_set_accuracy(const std::vector<ScoredPrediction>& preds) {
  std::size_t known = 0;
  std::size_t correct = 0;
  for (const auto& p : preds) {
    if (p.truth == kUnknownLabel) continue;
    ++known;
    if (p.predicted == p.truth) ++correct;
  }
  if (known == 0) {
    throw std::invalid_argument(
        "closed_set_accuracy: no known samples present");
  }
  return static_cast<double>(correct) / static_cast<double>(known);
}

double auroc(const std::vector<ScoredPrediction>& preds) {
  const KnownUnknownCounts counts = count_roles(preds, "auroc");
  auto order = order_by_score_desc(preds);
  std::reverse(order.begin(), order.end());  // ascending score

  // Walk tie groups from the lowest score up; each known in a group wins
  // against every unknown strictly below and half-wins against unknowns in
  // its own group. Exactly the all-pairs count.
  double wins = 0.0;
  std::size_t unknown_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double score = preds[order[i]].score;
    std::size_t j = i;
    std::size_t known_in_group = 0;
    std::size_t unknown_in_group = 0;
    while (j < order.size() && preds[order[j]].score == score) {
      if (preds[order[j]].truth == kUnknownLabel) {
        ++unknown_in_group;
      } else {
        ++known_in_group;
      }
      ++j;
    }
    wins += static_cast<double>(known_in_group) *
                static_cast<double>(unknown_below) +
            0.5 * static_cast<double>(known_in_group) *
                static_cast<double>(unknown_in_group);
    unknown_below += unknown_in_group;
    i = j;
  }
  return wins / (static_cast<double>(counts.known) *
                 static_cast<double>(counts.unknown));
}

OscrResult oscr(const std::vector<ScoredPrediction>& preds) {
  const KnownUnknownCounts counts = count_roles(preds, "oscr");
  OscrResult result;
  result.curve = sweep_thresholds(preds, counts, [](const ScoredPrediction& p) {
    return p.predicted == p.truth;
  });
  result.area = trapezoid_area(result.curve);
  return result;
}

std::vector<CurvePoint> roc_points(const std::vector<ScoredPrediction>& preds) {
  const KnownUnknownCounts counts = count_roles(preds, "roc_points");
  return sweep_thresholds(preds, counts,
                          [](const ScoredPrediction&) { return true; });
}

MetricsReport aggregate_trials(const std::vector<TrialMetrics>& trials) {
  if (trials.empty()) {
    throw std::invalid_argument("aggregate_trials: no trials");
  }
  MetricsReport report;
  report.trials = trials;
  for (const auto& t : trials) {
    report.mean.acc += t.acc;
    report.mean.auroc += t.auroc;
    report.mean.oscr += t.oscr;
  }
  const double inv = 1.0 / static_cast<double>(trials.size());
  report.mean.acc *= inv;
  report.mean.auroc *= inv;
  report.mean.oscr *= inv;
  return report;
}

}  // namespace ucdsc
