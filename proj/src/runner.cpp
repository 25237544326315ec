#include "ucdsc/runner.hpp"

#include <algorithm>
#include <set>

#include "ucdsc/rng.hpp"

namespace ucdsc {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDatasetSalt = 0xda7a5e7da7a5e7ULL;
constexpr std::uint64_t kBackgroundSalt = 0xbac269041bac269ULL;

std::vector<int> training_dims(const RunConfig& cfg, Eigen::Index input_dim) {
  std::vector<int> dims;
  dims.push_back(static_cast<int>(input_dim));
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(cfg.feature_dim);
  return dims;
}

TrainConfig make_train_config(const RunConfig& cfg, Eigen::Index input_dim,
                              std::uint64_t seed) {
  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.seed = seed;
  tc.weights = cfg.weights;
  tc.expand_factor = cfg.expand_factor;
  tc.background_per_batch = cfg.background_per_batch;
  tc.layer_dims = training_dims(cfg, input_dim);
  return tc;
}

// The split used by train/eval when the config lists known classes
// explicitly: everything else in the dataset becomes unknown.
TrialSplit explicit_split(const RunConfig& cfg, int total_classes) {
  TrialSplit split;
  split.known_classes = cfg.split.known_classes;
  std::set<int> known(split.known_classes.begin(), split.known_classes.end());
  for (int c = 0; c < total_classes; ++c) {
    if (!known.count(c)) split.unknown_classes.push_back(c);
  }
  split.trial_index = 0;
  split.seed = cfg.seed;
  return split;
}

void check_known_count(int num_known, int feature_dim) {
  if (num_known < 2) {
    throw ConfigError("training needs at least 2 known classes");
  }
  if (feature_dim < num_known - 1) {
    throw ConfigError("network.feature_dim must be >= known classes - 1 (d=" +
                      std::to_string(feature_dim) +
                      ", C=" + std::to_string(num_known) + ")");
  }
}

// Known rows chosen per eval_on plus every unknown sample from the test view.
std::pair<Matrix, std::vector<int>> assemble_eval_set(
    const TrialViews& views, const std::string& eval_on) {
  const bool want_train = eval_on == "train" || eval_on == "all";
  const bool want_test = eval_on == "test" || eval_on == "all";
  Eigen::Index rows = 0;
  if (want_train) rows += views.train.samples.rows();
  for (std::size_t i = 0; i < views.test.labels.size(); ++i) {
    if (views.test.labels[i] != kUnknownLabel && !want_test) continue;
    ++rows;
  }

  Matrix samples(rows, views.test.samples.cols());
  std::vector<int> truths(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  if (want_train) {
    for (Eigen::Index i = 0; i < views.train.samples.rows(); ++i, ++at) {
      samples.row(at) = views.train.samples.row(i);
      truths[static_cast<std::size_t>(at)] =
          views.train.labels[static_cast<std::size_t>(i)];
    }
  }
  for (Eigen::Index i = 0; i < views.test.samples.rows(); ++i) {
    const int label = views.test.labels[static_cast<std::size_t>(i)];
    if (label != kUnknownLabel && !want_test) continue;
    samples.row(at) = views.test.samples.row(i);
    truths[static_cast<std::size_t>(at)] = label;
    ++at;
  }
  return {std::move(samples), std::move(truths)};
}

TrialMetrics evaluate_predictions(const MlpModel& model,
                                  const SimplexCenters& centers,
                                  const Matrix& samples,
                                  const std::vector<int>& truths,
                                  ScoreMode mode,
                                  std::vector<CurvePoint>* roc_out,
                                  std::vector<CurvePoint>* oscr_out) {
  const Matrix features = forward(model, samples).first;
  const auto preds = score_samples(features, centers, mode, truths);
  TrialMetrics metrics;
  metrics.acc = closed_set_accuracy(preds);
  metrics.auroc = auroc(preds);
  const OscrResult o = oscr(preds);
  metrics.oscr = o.area;
  if (oscr_out != nullptr) *oscr_out = o.curve;
  if (roc_out != nullptr) *roc_out = roc_points(preds);
  return metrics;
}

void write_trial_outputs(const fs::path& dir, const TrainResult& trained,
                         const RunConfig& cfg, const TrialMetrics& metrics,
                         const std::vector<CurvePoint>& roc,
                         const std::vector<CurvePoint>& oscr_curve) {
  fs::create_directories(dir);
  Checkpoint ckpt{trained.model, cfg.expand_factor,
                  trained.centers.num_classes};
  write_text_file(dir / "model.json", checkpoint_to_json(ckpt).dump(2) + "\n");
  write_text_file(dir / "centers.json",
                  centers_to_json(trained.centers).dump(2) + "\n");
  write_text_file(dir / "loss_history.csv", history_to_csv(trained.history));
  write_text_file(dir / "metrics.json",
                  report_to_json(aggregate_trials({metrics})).dump(2) + "\n");
  write_text_file(dir / "roc.csv", curve_to_csv(roc));
  write_text_file(dir / "oscr.csv", curve_to_csv(oscr_curve));
}

MetricsReport trial_suite(const RunConfig& cfg, const ResolvedData& data,
                          const std::optional<fs::path>& out_dir) {
  if (!cfg.split.has_protocol) {
    throw ConfigError("trials requires split.num_known (and num_trials)");
  }
  check_known_count(cfg.split.num_known, cfg.feature_dim);
  const auto splits =
      make_trials(data.dataset.num_classes, cfg.split.num_known,
                  cfg.split.num_trials, cfg.seed);

  std::vector<TrialMetrics> per_trial;
  per_trial.reserve(splits.size());
  for (const auto& split : splits) {
    const TrialViews views = relabel_for_trial(data.dataset, split);
    const TrainConfig tc =
        make_train_config(cfg, data.dataset.samples.cols(), split.seed);
    const TrainResult trained = train(views.train, data.background, tc);
    const auto [samples, truths] = assemble_eval_set(views, cfg.eval_on);
    std::vector<CurvePoint> roc;
    std::vector<CurvePoint> oscr_curve;
    const TrialMetrics metrics =
        evaluate_predictions(trained.model, trained.centers, samples, truths,
                             cfg.score_mode, &roc, &oscr_curve);
    if (out_dir) {
      write_trial_outputs(
          *out_dir / ("trial_" + std::to_string(split.trial_index)), trained,
          cfg, metrics, roc, oscr_curve);
    }
    per_trial.push_back(metrics);
  }
  MetricsReport report = aggregate_trials(per_trial);
  if (out_dir) {
    write_text_file(*out_dir / "summary.json",
                    report_to_json(report).dump(2) + "\n");
    if (!data.label_map.is_null()) {
      write_text_file(*out_dir / "label_map.json",
                      data.label_map.dump(2) + "\n");
    }
  }
  return report;
}

}  // namespace

ResolvedData resolve_data(const RunConfig& cfg) {
  ResolvedData out;
  if (cfg.dataset.type == DatasetSource::Type::kSynthetic) {
    out.dataset =
        generate_blobs(cfg.dataset.spec, mix_seed(cfg.seed ^ kDatasetSalt));
  } else {
    CsvDataset loaded;
    try {
      loaded = load_csv(cfg.dataset.path);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    out.dataset = std::move(loaded.dataset);
    if (loaded.remapped) {
      Json map = Json::object();
      for (const auto& [orig, dense] : loaded.label_map) {
        map[std::to_string(orig)] = dense;
      }
      out.label_map = std::move(map);
    }
  }

  const Eigen::Index dim = out.dataset.samples.cols();
  if (cfg.background.type == BackgroundSource::Type::kNoise) {
    out.background =
        generate_background(cfg.background.count, static_cast<int>(dim),
                            cfg.background.low, cfg.background.high,
                            mix_seed(cfg.seed ^ kBackgroundSalt));
  } else if (cfg.background.type == BackgroundSource::Type::kCsv) {
    // background files reuse the dataset CSV layout; the label column is
    // ignored
    try {
      out.background = load_csv(cfg.background.path).dataset.samples;
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    if (out.background.cols() != dim) {
      throw ConfigError("background CSV width does not match the dataset");
    }
  } else {
    out.background = Matrix(0, dim);
  }

  const int total = out.dataset.num_classes;
  if (cfg.split.has_explicit) {
    for (const int c : cfg.split.known_classes) {
      if (c < 0 || c >= total) {
        throw ConfigError("split.known_classes references class " +
                          std::to_string(c) + " outside [0, " +
                          std::to_string(total) + ")");
      }
    }
    check_known_count(static_cast<int>(cfg.split.known_classes.size()),
                      cfg.feature_dim);
  } else if (cfg.split.has_protocol) {
    if (cfg.split.num_known >= total) {
      throw ConfigError("split.num_known must be below the dataset's " +
                        std::to_string(total) + " classes");
    }
    check_known_count(cfg.split.num_known, cfg.feature_dim);
  } else {
    check_known_count(total, cfg.feature_dim);
  }
  return out;
}

void run_train(const RunConfig& cfg, const fs::path& out_dir) {
  const ResolvedData data = resolve_data(cfg);
  if (cfg.split.has_protocol) {
    throw ConfigError(
        "train takes split.known_classes; the trials command runs the "
        "num_known/num_trials protocol");
  }

  LabeledDataset train_data;
  if (cfg.split.has_explicit) {
    const TrialSplit split =
        explicit_split(cfg, data.dataset.num_classes);
    train_data = relabel_for_trial(data.dataset, split).train;
  } else {
    train_data = data.dataset;
  }
  const TrainConfig tc =
      make_train_config(cfg, data.dataset.samples.cols(), cfg.seed);

  const TrainResult trained = train(train_data, data.background, tc);

  fs::create_directories(out_dir);
  Checkpoint ckpt{trained.model, cfg.expand_factor,
                  trained.centers.num_classes};
  write_text_file(out_dir / "model.json",
                  checkpoint_to_json(ckpt).dump(2) + "\n");
  write_text_file(out_dir / "centers.json",
                  centers_to_json(trained.centers).dump(2) + "\n");
  write_text_file(out_dir / "loss_history.csv",
                  history_to_csv(trained.history));
  if (!data.label_map.is_null()) {
    write_text_file(out_dir / "label_map.json", data.label_map.dump(2) + "\n");
  }
}

TrialMetrics run_eval(const fs::path& checkpoint_path, const RunConfig& cfg,
                      const fs::path& out_dir) {
  Checkpoint ckpt;
  try {
    ckpt = checkpoint_from_json(read_json_file(checkpoint_path));
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }

  const ResolvedData data = resolve_data(cfg);
  if (cfg.split.has_protocol) {
    throw ConfigError(
        "eval takes split.known_classes; the trials command runs the "
        "num_known/num_trials protocol");
  }
  if (!cfg.split.has_explicit) {
    throw ConfigError(
        "eval needs unknown samples: list the checkpoint's known classes in "
        "split.known_classes so remaining classes become unknowns");
  }
  if (static_cast<int>(cfg.split.known_classes.size()) != ckpt.num_classes) {
    throw ConfigError("split.known_classes lists " +
                      std::to_string(cfg.split.known_classes.size()) +
                      " classes but the checkpoint was trained on " +
                      std::to_string(ckpt.num_classes));
  }
  if (static_cast<int>(cfg.split.known_classes.size()) ==
      data.dataset.num_classes) {
    throw ConfigError(
        "eval needs unknown samples: every dataset class is listed as known");
  }
  if (ckpt.model.input_dim() != data.dataset.samples.cols()) {
    throw ConfigError("checkpoint input dim " +
                      std::to_string(ckpt.model.input_dim()) +
                      " does not match dataset dim " +
                      std::to_string(data.dataset.samples.cols()));
  }

  const SimplexCenters centers = build_simplex(
      ckpt.num_classes, ckpt.model.output_dim(), ckpt.expand_factor);
  const TrialSplit split = explicit_split(cfg, data.dataset.num_classes);
  const TrialViews views = relabel_for_trial(data.dataset, split);
  const auto [samples, truths] = assemble_eval_set(views, cfg.eval_on);

  std::vector<CurvePoint> roc;
  std::vector<CurvePoint> oscr_curve;
  const TrialMetrics metrics =
      evaluate_predictions(ckpt.model, centers, samples, truths,
                           cfg.score_mode, &roc, &oscr_curve);

  fs::create_directories(out_dir);
  write_text_file(out_dir / "metrics.json",
                  report_to_json(aggregate_trials({metrics})).dump(2) + "\n");
  write_text_file(out_dir / "roc.csv", curve_to_csv(roc));
  write_text_file(out_dir / "oscr.csv", curve_to_csv(oscr_curve));
  return metrics;
}

MetricsReport run_trials(const RunConfig& cfg,
                         const std::optional<fs::path>& out_dir) {
  const ResolvedData data = resolve_data(cfg);
  return trial_suite(cfg, data, out_dir);
}

void run_ablate(const AblationGrid& grid, const fs::path& out_dir) {
  struct Axis {
    const char* name;
    std::size_t size;
  };
  const std::vector<Axis> axes = {
      {"lambda_o", grid.lambda_o.size()},
      {"lambda_u", grid.lambda_u.size()},
      {"margin", grid.margin.size()},
      {"expand_factor", grid.expand_factor.size()},
      {"batch_size", grid.batch_size.size()},
  };

  std::size_t cells = 1;
  for (const auto& axis : axes) {
    if (axis.size > 0) cells *= axis.size;
  }
  if (cells > static_cast<std::size_t>(grid.max_cells)) {
    throw ConfigError("grid has " + std::to_string(cells) +
                      " cells, above the max_cells cap of " +
                      std::to_string(grid.max_cells));
  }

  // Build every cell config up front so all validation happens before any
  // training starts or any file is written.
  std::vector<RunConfig> cell_cfgs;
  std::vector<std::vector<std::size_t>> cell_indices;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    RunConfig c = grid.base;
    if (!grid.lambda_o.empty()) c.weights.lambda_o = grid.lambda_o[idx[0]];
    if (!grid.lambda_u.empty()) c.weights.lambda_u = grid.lambda_u[idx[1]];
    if (!grid.margin.empty()) c.weights.margin = grid.margin[idx[2]];
    if (!grid.expand_factor.empty()) {
      c.expand_factor = grid.expand_factor[idx[3]];
      if (!(c.expand_factor > 0.0)) {
        throw ConfigError("grid expand_factor values must be positive");
      }
    }
    if (!grid.batch_size.empty()) c.batch_size = grid.batch_size[idx[4]];
    if (c.weights.lambda_o > 0.0 &&
        c.background.type == BackgroundSource::Type::kNone) {
      throw ConfigError(
          "grid sets lambda_o > 0 but the base config has no background "
          "source");
    }
    cell_cfgs.push_back(std::move(c));
    cell_indices.push_back(idx);
    // advance the rightmost varied axis fastest
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (axes[a].size == 0) continue;
      if (++idx[a] < axes[a].size) break;
      idx[a] = 0;
    }
  }

  const ResolvedData data = resolve_data(grid.base);
  for (const auto& cfg : cell_cfgs) {
    if (!cfg.split.has_protocol) {
      throw ConfigError("ablation base config requires split.num_known");
    }
    check_known_count(cfg.split.num_known, cfg.feature_dim);
  }

  std::string csv;
  {
    std::string header;
    for (const auto& axis : axes) {
      if (axis.size > 0) header += std::string(axis.name) + ",";
    }
    csv = header + "auroc,oscr,acc\n";
  }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const RunConfig& cfg = cell_cfgs[cell];
    const MetricsReport report = trial_suite(cfg, data, std::nullopt);
    std::string row;
    if (!grid.lambda_o.empty()) {
      row += format_double(grid.lambda_o[cell_indices[cell][0]]) + ",";
    }
    if (!grid.lambda_u.empty()) {
      row += format_double(grid.lambda_u[cell_indices[cell][1]]) + ",";
    }
    if (!grid.margin.empty()) {
      row += format_double(grid.margin[cell_indices[cell][2]]) + ",";
    }
    if (!grid.expand_factor.empty()) {
      row += format_double(grid.expand_factor[cell_indices[cell][3]]) + ",";
    }
    if (!grid.batch_size.empty()) {
      row += std::to_string(grid.batch_size[cell_indices[cell][4]]) + ",";
    }
    row += format_double(report.mean.auroc) + "," +
           format_double(report.mean.oscr) + "," +
           format_double(report.mean.acc) + "\n";
    csv += row;
  }

  fs::create_directories(out_dir);
  write_text_file(out_dir / "ablation.csv", csv);
}

}  // namespace ucdsc
