#include "ucdsc/config.hpp"

#include <cmath>
#include <set>

namespace ucdsc {

namespace {

void reject_unknown_keys(const Json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw ConfigError(where + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type");
  }
}

template <class T>
T require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("key '") + key + "' in " + where +
                      " has the wrong type");
  }
}

DatasetSource parse_dataset(const Json& j) {
  DatasetSource src;
  const std::string type = require<std::string>(j, "type", "dataset");
  if (type == "synthetic") {
    reject_unknown_keys(j, "dataset",
                        {"type", "num_classes", "dim", "samples_per_class",
                         "center_scale", "noise_std"});
    src.type = DatasetSource::Type::kSynthetic;
    src.spec.num_classes = require<int>(j, "num_classes", "dataset");
    src.spec.dim = require<int>(j, "dim", "dataset");
    src.spec.samples_per_class = require<int>(j, "samples_per_class", "dataset");
    src.spec.center_scale = get_or<double>(j, "center_scale", 10.0);
    src.spec.noise_std = get_or<double>(j, "noise_std", 1.0);
    if (src.spec.num_classes < 2 || src.spec.dim < 1 ||
        src.spec.samples_per_class < 1 || !(src.spec.center_scale > 0.0) ||
        !(src.spec.noise_std > 0.0)) {
      throw ConfigError("synthetic dataset fields must all be positive");
    }
  } else if (type == "csv") {
    reject_unknown_keys(j, "dataset", {"type", "path"});
    src.type = DatasetSource::Type::kCsv;
    src.path = require<std::string>(j, "path", "dataset");
  } else {
    throw ConfigError("dataset type must be 'synthetic' or 'csv'");
  }
  return src;
}

BackgroundSource parse_background(const Json& j) {
  BackgroundSource src;
  const std::string type = require<std::string>(j, "type", "background");
  if (type == "noise") {
    reject_unknown_keys(j, "background", {"type", "count", "low", "high"});
    src.type = BackgroundSource::Type::kNoise;
    src.count = require<int>(j, "count", "background");
    src.low = get_or<double>(j, "low", -1.0);
    src.high = get_or<double>(j, "high", 1.0);
    if (src.count < 1) throw ConfigError("background count must be >= 1");
    if (!(src.low < src.high)) {
      throw ConfigError("background range requires low < high");
    }
  } else if (type == "csv") {
    reject_unknown_keys(j, "background", {"type", "path"});
    src.type = BackgroundSource::Type::kCsv;
    src.path = require<std::string>(j, "path", "background");
  } else {
    throw ConfigError("background type must be 'noise' or 'csv'");
  }
  return src;
}

SplitSpec parse_split(const Json& j) {
  reject_unknown_keys(j, "split", {"known_classes", "num_known", "num_trials"});
  SplitSpec split;
  if (j.contains("known_classes")) {
    if (j.contains("num_known") || j.contains("num_trials")) {
      throw ConfigError(
          "split takes either known_classes or the num_known/num_trials "
          "protocol, not both");
    }
    split.has_explicit = true;
    split.known_classes = require<std::vector<int>>(j, "known_classes", "split");
    if (split.known_classes.empty()) {
      throw ConfigError("split.known_classes must be non-empty");
    }
    std::set<int> seen(split.known_classes.begin(), split.known_classes.end());
    if (seen.size() != split.known_classes.size()) {
      throw ConfigError("split.known_classes must not repeat");
    }
  } else {
    split.has_protocol = true;
    split.num_known = require<int>(j, "num_known", "split");
    split.num_trials = get_or<int>(j, "num_trials", 1);
    if (split.num_known < 1) throw ConfigError("split.num_known must be >= 1");
    if (split.num_trials < 1) {
      throw ConfigError("split.num_trials must be >= 1");
    }
  }
  return split;
}

}  // namespace

RunConfig parse_run_config(const Json& j) {
  reject_unknown_keys(j, "config",
                      {"seed", "out_dir", "score_mode", "dataset",
                       "background", "split", "network", "loss", "train",
                       "eval_on"});
  RunConfig cfg;
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "");
  if (j.contains("score_mode")) {
    try {
      cfg.score_mode =
          score_mode_from_string(j.at("score_mode").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (!j.contains("dataset")) {
    throw ConfigError("missing key 'dataset' in config");
  }
  cfg.dataset = parse_dataset(j.at("dataset"));
  if (j.contains("background")) {
    cfg.background = parse_background(j.at("background"));
  }
  if (j.contains("split")) {
    cfg.split = parse_split(j.at("split"));
  }

  if (j.contains("network")) {
    const Json& net = j.at("network");
    reject_unknown_keys(net, "network", {"hidden_dims", "feature_dim"});
    cfg.hidden_dims = get_or<std::vector<int>>(net, "hidden_dims",
                                               cfg.hidden_dims);
    cfg.feature_dim = get_or<int>(net, "feature_dim", cfg.feature_dim);
  }
  for (const int d : cfg.hidden_dims) {
    if (d < 1) throw ConfigError("network.hidden_dims must be positive");
  }
  if (cfg.feature_dim < 1) {
    throw ConfigError("network.feature_dim must be >= 1");
  }

  if (j.contains("loss")) {
    const Json& loss = j.at("loss");
    reject_unknown_keys(loss, "loss", {"lambda_o", "lambda_u", "margin"});
    cfg.weights.lambda_o = get_or<double>(loss, "lambda_o", cfg.weights.lambda_o);
    cfg.weights.lambda_u = get_or<double>(loss, "lambda_u", cfg.weights.lambda_u);
    cfg.weights.margin = get_or<double>(loss, "margin", cfg.weights.margin);
  }
  for (const double v :
       {cfg.weights.lambda_o, cfg.weights.lambda_u, cfg.weights.margin}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError("loss weights and margin must be finite and >= 0");
    }
  }

  if (j.contains("train")) {
    const Json& tr = j.at("train");
    reject_unknown_keys(tr, "train",
                        {"epochs", "batch_size", "learning_rate",
                         "expand_factor", "background_per_batch"});
    cfg.epochs = get_or<int>(tr, "epochs", cfg.epochs);
    cfg.batch_size = get_or<int>(tr, "batch_size", cfg.batch_size);
    cfg.learning_rate = get_or<double>(tr, "learning_rate", cfg.learning_rate);
    cfg.expand_factor = get_or<double>(tr, "expand_factor", cfg.expand_factor);
    cfg.background_per_batch =
        get_or<int>(tr, "background_per_batch", cfg.background_per_batch);
  }
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw ConfigError("train.epochs and train.batch_size must be >= 1");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw ConfigError("train.learning_rate must be positive");
  }
  if (!(cfg.expand_factor > 0.0) || !std::isfinite(cfg.expand_factor)) {
    throw ConfigError("train.expand_factor must be positive and finite");
  }
  if (cfg.background_per_batch < 0) {
    throw ConfigError("train.background_per_batch must be >= 0");
  }

  cfg.eval_on = get_or<std::string>(j, "eval_on", cfg.eval_on);
  if (cfg.eval_on != "test" && cfg.eval_on != "train" && cfg.eval_on != "all") {
    throw ConfigError("eval_on must be one of test, train, all");
  }

  if (cfg.weights.lambda_o > 0.0 &&
      cfg.background.type == BackgroundSource::Type::kNone) {
    throw ConfigError("lambda_o > 0 requires a background source");
  }
  return cfg;
}

AblationGrid parse_ablation_grid(const Json& j) {
  reject_unknown_keys(j, "grid config", {"base", "grid", "max_cells"});
  if (!j.contains("base") || !j.contains("grid")) {
    throw ConfigError("ablation config needs 'base' and 'grid'");
  }
  AblationGrid grid;
  grid.base = parse_run_config(j.at("base"));
  grid.max_cells = get_or<int>(j, "max_cells", grid.max_cells);
  if (grid.max_cells < 1) throw ConfigError("max_cells must be >= 1");

  const Json& g = j.at("grid");
  reject_unknown_keys(
      g, "grid",
      {"lambda_o", "lambda_u", "margin", "expand_factor", "batch_size"});
  grid.lambda_o = get_or<std::vector<double>>(g, "lambda_o", {});
  grid.lambda_u = get_or<std::vector<double>>(g, "lambda_u", {});
  grid.margin = get_or<std::vector<double>>(g, "margin", {});
  grid.expand_factor = get_or<std::vector<double>>(g, "expand_factor", {});
  grid.batch_size = get_or<std::vector<int>>(g, "batch_size", {});
  if (grid.lambda_o.empty() && grid.lambda_u.empty() && grid.margin.empty() &&
      grid.expand_factor.empty() && grid.batch_size.empty()) {
    throw ConfigError("grid must vary at least one axis");
  }
  for (const auto& axis : {grid.lambda_o, grid.lambda_u, grid.margin,
                           grid.expand_factor}) {
    for (const double v : axis) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ConfigError("grid values must be finite and >= 0");
      }
    }
  }
  for (const int b : grid.batch_size) {
    if (b < 1) throw ConfigError("grid batch_size values must be >= 1");
  }
  return grid;
}

}  // namespace ucdsc
