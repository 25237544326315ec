#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ucdsc/config.hpp"
#include "ucdsc/network.hpp"

namespace ucdsc {

// Dataset plus background pool materialized from a RunConfig.
struct ResolvedData {
  LabeledDataset dataset;
  Matrix background;          // 0 x dim when no background source
  Json label_map;             // non-null when CSV ingestion remapped labels
};

// Loads or generates the data named by the config and cross-validates every
// field that depends on it (class counts, dimensions, split feasibility).
// Throws ConfigError; performs no writes.
ResolvedData resolve_data(const RunConfig& cfg);

// Trains per the config (restricted to split.known_classes when present) and
// writes model.json, centers.json, loss_history.csv, and the label map when
// CSV ingestion remapped labels. No file is written before validation passes.
void run_train(const RunConfig& cfg, const std::filesystem::path& out_dir);

// Evaluates a checkpoint against the config's dataset and split, writing
// metrics.json, roc.csv, and oscr.csv. The known part of the evaluation set
// follows cfg.eval_on (test | train | all); unknown-class samples are always
// all included.
TrialMetrics run_eval(const std::filesystem::path& checkpoint_path,
                      const RunConfig& cfg,
                      const std::filesystem::path& out_dir);

// The K-trial protocol: train + evaluate one model per random split, writing
// trial_<k>/ directories and summary.json. When out_dir is empty the suite
// runs in memory (used by ablation cells).
MetricsReport run_trials(const RunConfig& cfg,
                         const std::optional<std::filesystem::path>& out_dir);

// One trial-suite run per grid cell; writes ablation.csv with one row per
// cell in cartesian order (lambda_o, lambda_u, margin, expand_factor,
// batch_size; rightmost axis fastest).
void run_ablate(const AblationGrid& grid,
                const std::filesystem::path& out_dir);

}  // namespace ucdsc
