#pragma once

#include <string>
#include <vector>

#include "ucdsc/simplex.hpp"
#include "ucdsc/types.hpp"

namespace ucdsc {

// Known-ness score for test-time rejection. Both candidates are derived from
// the center geometry: negated nearest squared distance, or one minus the
// uncertainty ratio. Higher always means "more confidently known".
enum class ScoreMode { kNegMinDist, kOneMinusU };

ScoreMode score_mode_from_string(const std::string& name);
std::string to_string(ScoreMode mode);

// predicted always names a known class; rejection happens downstream by
// thresholding the score. truth is kUnknownLabel for open-set samples.
struct ScoredPrediction {
  double score = 0.0;
  int predicted = 0;
  int truth = kUnknownLabel;
};

// Scores each row: predicted is the nearest center, score per the mode.
// truths must be empty (all samples treated as unknown) or one per row.
std::vector<ScoredPrediction> score_samples(const Matrix& features,
                                            const SimplexCenters& centers,
                                            ScoreMode mode,
                                            const std::vector<int>& truths = {});

// Fraction of known-truth samples whose predicted class matches, with no
// thresholding involved.
double closed_set_accuracy(const std::vector<ScoredPrediction>& preds);

// Probability that a uniformly random known sample outscores a uniformly
// random unknown one, ties counting one half. Computed by sorting but exactly
// equal to the all-pairs count.
double auroc(const std::vector<ScoredPrediction>& preds);

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct OscrResult {
  std::vector<CurvePoint> curve;  // x = FPR, y = CCR, sorted by x
  double area = 0.0;
};

// Correct classification rate of knowns against false positive rate of
// unknowns over descending score thresholds (all unique scores plus +inf,
// which anchors the curve at (0,0)); area by the trapezoidal rule.
OscrResult oscr(const std::vector<ScoredPrediction>& preds);

// Standard ROC over the known-vs-unknown decision: x = FPR, y = TPR.
std::vector<CurvePoint> roc_points(const std::vector<ScoredPrediction>& preds);

struct TrialMetrics {
  double acc = 0.0;
  double auroc = 0.0;
  double oscr = 0.0;
};

struct MetricsReport {
  std::vector<TrialMetrics> trials;
  TrialMetrics mean;
};

// Arithmetic mean of the per-trial metrics.
MetricsReport aggregate_trials(const std::vector<TrialMetrics>& trials);

}  // namespace ucdsc
