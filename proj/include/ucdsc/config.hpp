#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucdsc/losses.hpp"
#include "ucdsc/metrics.hpp"
#include "ucdsc/serialize.hpp"

namespace ucdsc {

struct DatasetSource {
  enum class Type { kSynthetic, kCsv };
  Type type = Type::kSynthetic;
  SyntheticSpec spec;  // kSynthetic
  std::string path;    // kCsv
};

struct BackgroundSource {
  enum class Type { kNone, kNoise, kCsv };
  Type type = Type::kNone;
  int count = 0;      // kNoise
  double low = -1.0;  // kNoise
  double high = 1.0;  // kNoise
  std::string path;   // kCsv
};

// Either an explicit list of known classes (train/eval) or the random-split
// protocol (trials). At most one of the two forms is present.
struct SplitSpec {
  bool has_explicit = false;
  std::vector<int> known_classes;
  bool has_protocol = false;
  int num_known = 0;
  int num_trials = 1;
};

// One JSON document drives every command. Unknown keys are rejected at every
// level so hyperparameter typos fail loudly instead of silently using a
// default.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir;
  ScoreMode score_mode = ScoreMode::kNegMinDist;
  DatasetSource dataset;
  BackgroundSource background;
  SplitSpec split;
  std::vector<int> hidden_dims = {128, 64};
  int feature_dim = 16;
  LossWeights weights;  // lambda_o 1, lambda_u 5, margin 38
  int epochs = 200;
  int batch_size = 512;
  double learning_rate = 0.01;
  double expand_factor = 100.0;
  int background_per_batch = 0;       // 0 means batch_size
  std::string eval_on = "test";       // test | train | all
};

// Parses and validates everything derivable without touching the data
// (ranges, enum values, structural consistency). Throws ConfigError.
RunConfig parse_run_config(const Json& j);

// Axes that cmd_ablate may vary, in the fixed cartesian iteration order.
struct AblationGrid {
  RunConfig base;
  std::vector<double> lambda_o;
  std::vector<double> lambda_u;
  std::vector<double> margin;
  std::vector<double> expand_factor;
  std::vector<int> batch_size;
  int max_cells = 256;
};

AblationGrid parse_ablation_grid(const Json& j);

}  // namespace ucdsc
