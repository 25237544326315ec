#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ucdsc/runner.hpp"

using namespace ucdsc;
namespace fs = std::filesystem;

namespace {

// Small synthetic scenario that trains in well under a second.
Json base_config() {
  return Json{
      {"seed", 7},
      {"dataset",
       {{"type", "synthetic"},
        {"num_classes", 4},
        {"dim", 4},
        {"samples_per_class", 30},
        {"center_scale", 8.0},
        {"noise_std", 1.0}}},
      {"background", {{"type", "noise"}, {"count", 64}, {"low", -10.0},
                      {"high", 10.0}}},
      {"network", {{"hidden_dims", {8}}, {"feature_dim", 2}}},
      {"loss", {{"lambda_o", 1.0}, {"lambda_u", 1.0}, {"margin", 4.0}}},
      {"train", {{"epochs", 4}, {"batch_size", 16}, {"learning_rate", 0.01},
                 {"expand_factor", 10.0}}},
  };
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("defaults follow the documented recipe") {
  const RunConfig cfg = parse_run_config(
      Json{{"dataset",
            {{"type", "synthetic"}, {"num_classes", 4}, {"dim", 4},
             {"samples_per_class", 10}}},
           {"loss", {{"lambda_o", 0.0}}}});
  CHECK(cfg.weights.lambda_o == 0.0);
  CHECK(cfg.weights.lambda_u == 5.0);
  CHECK(cfg.weights.margin == 38.0);
  CHECK(cfg.batch_size == 512);
  CHECK(cfg.learning_rate == 0.01);
  CHECK(cfg.expand_factor == 100.0);
  CHECK(cfg.epochs == 200);
  CHECK(cfg.hidden_dims == std::vector<int>{128, 64});
  CHECK(cfg.score_mode == ScoreMode::kNegMinDist);
}

TEST_CASE("unknown keys are rejected at every level") {
  Json cfg = base_config();
  cfg["typo"] = 1;
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);

  cfg = base_config();
  cfg["loss"]["lambda_x"] = 1.0;
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);

  cfg = base_config();
  cfg["train"]["epoch"] = 10;
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);

  cfg = base_config();
  cfg["dataset"]["shape"] = 3;
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);
}

TEST_CASE("config validation catches cross-field mistakes") {
  Json no_dataset = Json::object();
  CHECK_THROWS_AS(parse_run_config(no_dataset), ConfigError);

  Json cfg = base_config();
  cfg.erase("background");
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);  // lambda_o > 0

  cfg = base_config();
  cfg["loss"]["lambda_o"] = 0.0;
  cfg.erase("background");
  CHECK_NOTHROW(parse_run_config(cfg));

  cfg = base_config();
  cfg["score_mode"] = "bogus";
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);

  cfg = base_config();
  cfg["split"] = {{"known_classes", Json::array({0, 1})}, {"num_known", 2}};
  CHECK_THROWS_AS(parse_run_config(cfg), ConfigError);
}

TEST_CASE("feature_dim must cover the known classes") {
  Json cfg = base_config();
  cfg["network"]["feature_dim"] = 2;
  cfg["split"] = {{"num_known", 2}, {"num_trials", 1}};
  CHECK_NOTHROW(resolve_data(parse_run_config(cfg)));
  cfg["network"]["feature_dim"] = 1;
  cfg["split"] = {{"num_known", 3}, {"num_trials", 1}};
  CHECK_THROWS_AS(resolve_data(parse_run_config(cfg)), ConfigError);
}

TEST_CASE("train writes its three files and is byte-stable") {
  Json cfg_json = base_config();
  cfg_json["split"] = {{"known_classes", Json::array({2, 0})}};
  const RunConfig cfg = parse_run_config(cfg_json);

  const fs::path out_a = fresh_dir("ucdsc_train_a");
  run_train(cfg, out_a);
  CHECK(fs::exists(out_a / "model.json"));
  CHECK(fs::exists(out_a / "centers.json"));
  CHECK(fs::exists(out_a / "loss_history.csv"));

  const fs::path out_b = fresh_dir("ucdsc_train_b");
  run_train(cfg, out_b);
  CHECK(slurp(out_a / "loss_history.csv") == slurp(out_b / "loss_history.csv"));
  CHECK(slurp(out_a / "model.json") == slurp(out_b / "model.json"));

  const std::string history = slurp(out_a / "loss_history.csv");
  CHECK(history.rfind("epoch,mean_total,mean_intra,mean_outlier,"
                      "mean_uncertainty\n", 0) == 0);

  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("eval needs unknowns and consistent dimensions") {
  Json cfg_json = base_config();
  cfg_json["split"] = {{"known_classes", Json::array({2, 0})}};
  const RunConfig cfg = parse_run_config(cfg_json);
  const fs::path out = fresh_dir("ucdsc_eval_train");
  run_train(cfg, out);

  // evaluating train-set knowns of the separable run classifies near-perfectly
  Json eval_json = base_config();
  eval_json["split"] = {{"known_classes", Json::array({2, 0})}};
  eval_json["eval_on"] = "train";
  const RunConfig eval_cfg = parse_run_config(eval_json);
  const fs::path eval_out = fresh_dir("ucdsc_eval_out");
  const TrialMetrics m = run_eval(out / "model.json", eval_cfg, eval_out);
  CHECK(m.acc >= 0.0);
  CHECK(m.acc <= 1.0);
  CHECK(m.auroc >= 0.0);
  CHECK(m.auroc <= 1.0);
  CHECK(m.oscr >= 0.0);
  CHECK(m.oscr <= 1.0);
  CHECK(fs::exists(eval_out / "metrics.json"));
  CHECK(fs::exists(eval_out / "roc.csv"));
  CHECK(fs::exists(eval_out / "oscr.csv"));

  // all four classes known -> nothing is unknown -> config error
  Json no_unknowns = base_config();
  no_unknowns["split"] = {{"known_classes", Json::array({0, 1, 2, 3})}};
  no_unknowns["network"]["feature_dim"] = 4;
  CHECK_THROWS_AS(run_eval(out / "model.json",
                           parse_run_config(no_unknowns),
                           fresh_dir("ucdsc_eval_bad")),
                  ConfigError);

  // no split at all
  CHECK_THROWS_AS(run_eval(out / "model.json",
                           parse_run_config(base_config()),
                           fresh_dir("ucdsc_eval_bad2")),
                  ConfigError);

  // known count must match the checkpoint
  Json wrong_count = base_config();
  wrong_count["split"] = {{"known_classes", Json::array({0, 1, 2})}};
  CHECK_THROWS_AS(run_eval(out / "model.json",
                           parse_run_config(wrong_count),
                           fresh_dir("ucdsc_eval_bad3")),
                  ConfigError);

  fs::remove_all(out);
  fs::remove_all(eval_out);
}

TEST_CASE("trial suite writes per-trial dirs and a consistent summary") {
  Json cfg_json = base_config();
  cfg_json["split"] = {{"num_known", 2}, {"num_trials", 3}};
  const RunConfig cfg = parse_run_config(cfg_json);

  const fs::path out = fresh_dir("ucdsc_trials");
  const MetricsReport report = run_trials(cfg, out);
  REQUIRE(report.trials.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(fs::exists(out / ("trial_" + std::to_string(k)) / "metrics.json"));
    CHECK(fs::exists(out / ("trial_" + std::to_string(k)) /
                     "loss_history.csv"));
  }
  CHECK(fs::exists(out / "summary.json"));

  // summary means equal the hand average of the trial files
  double acc_sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Json t = Json::parse(
        slurp(out / ("trial_" + std::to_string(k)) / "metrics.json"));
    acc_sum += t.at("mean").at("acc").get<double>();
  }
  const Json summary = Json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("mean").at("acc").get<double>() ==
        doctest::Approx(acc_sum / 3.0).epsilon(1e-15));

  // byte-identical rerun
  const fs::path out2 = fresh_dir("ucdsc_trials2");
  run_trials(cfg, out2);
  CHECK(slurp(out / "summary.json") == slurp(out2 / "summary.json"));
  for (int k = 0; k < 3; ++k) {
    const std::string name = "trial_" + std::to_string(k);
    CHECK(slurp(out / name / "metrics.json") ==
          slurp(out2 / name / "metrics.json"));
    CHECK(slurp(out / name / "loss_history.csv") ==
          slurp(out2 / name / "loss_history.csv"));
  }
  fs::remove_all(out);
  fs::remove_all(out2);
}

TEST_CASE("ablation grid runs in cartesian order with a cap") {
  Json grid_json = {
      {"base", base_config()},
      {"grid", {{"lambda_o", {0.0, 1.0}}, {"lambda_u", {0.0, 1.0}}}},
  };
  grid_json["base"]["split"] = {{"num_known", 2}, {"num_trials", 1}};
  grid_json["base"]["train"]["epochs"] = 2;
  const AblationGrid grid = parse_ablation_grid(grid_json);

  const fs::path out = fresh_dir("ucdsc_ablate");
  run_ablate(grid, out);
  const std::string csv = slurp(out / "ablation.csv");
  std::vector<std::string> lines;
  for (std::size_t pos = 0, next; pos < csv.size(); pos = next + 1) {
    next = csv.find('\n', pos);
    if (next == std::string::npos) break;
    lines.push_back(csv.substr(pos, next - pos));
  }
  REQUIRE(lines.size() == 5);  // header + 4 cells
  CHECK(lines[0] == "lambda_o,lambda_u,auroc,oscr,acc");
  CHECK(lines[1].rfind("0,0,", 0) == 0);
  CHECK(lines[2].rfind("0,1,", 0) == 0);
  CHECK(lines[3].rfind("1,0,", 0) == 0);
  CHECK(lines[4].rfind("1,1,", 0) == 0);

  // the (0, 0) cell equals a plain trial suite with those weights
  Json plain = grid_json["base"];
  plain["loss"]["lambda_o"] = 0.0;
  plain["loss"]["lambda_u"] = 0.0;
  const MetricsReport direct =
      run_trials(parse_run_config(plain), std::nullopt);
  const std::string expected =
      "0,0," + format_double(direct.mean.auroc) + "," +
      format_double(direct.mean.oscr) + "," + format_double(direct.mean.acc);
  CHECK(lines[1] == expected);

  // cap enforcement fires before anything runs
  Json capped = grid_json;
  capped["max_cells"] = 3;
  CHECK_THROWS_AS(run_ablate(parse_ablation_grid(capped),
                             fresh_dir("ucdsc_ablate_capped")),
                  ConfigError);

  fs::remove_all(out);
}

TEST_CASE("csv-ingested datasets flow through training") {
  SyntheticSpec spec{3, 3, 20, 8.0, 0.5};
  const LabeledDataset ds = generate_blobs(spec, 12);
  LabeledDataset sparse = ds;
  for (auto& label : sparse.labels) label = label * 5 + 2;  // 2, 7, 12
  // sparse labels on disk exercise the dense remapping path
  const fs::path csv_path =
      fs::temp_directory_path() / "ucdsc_runner_data.csv";
  {
    LabeledDataset on_disk = sparse;
    save_csv(on_disk, csv_path.string());
  }

  Json cfg_json = {
      {"seed", 3},
      {"dataset", {{"type", "csv"}, {"path", csv_path.string()}}},
      {"loss", {{"lambda_o", 0.0}, {"lambda_u", 0.5}}},
      {"network", {{"hidden_dims", {6}}, {"feature_dim", 2}}},
      {"train", {{"epochs", 2}, {"batch_size", 8}, {"expand_factor", 5.0}}},
      {"split", {{"known_classes", Json::array({0, 1})}}},
  };
  const RunConfig cfg = parse_run_config(cfg_json);
  const fs::path out = fresh_dir("ucdsc_csv_train");
  run_train(cfg, out);
  CHECK(fs::exists(out / "model.json"));
  CHECK(fs::exists(out / "label_map.json"));
  const Json map = Json::parse(slurp(out / "label_map.json"));
  CHECK(map.at("2").get<int>() == 0);
  CHECK(map.at("7").get<int>() == 1);
  CHECK(map.at("12").get<int>() == 2);

  fs::remove(csv_path);
  fs::remove_all(out);
}
