#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ucdsc/config.hpp"
#include "ucdsc/runner.hpp"
#include "ucdsc/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> score_mode;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* config =
      cmd->add_option("--config", opts.config_path, "JSON run configuration");
  if (config_required) config->required();
  cmd->add_option("--out", opts.out_dir,
                  "output directory (overrides config out_dir)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&opts](std::uint64_t s) { opts.seed = s; },
      "root seed (overrides config)");
  cmd->add_option_function<std::string>(
      "--score-mode", [&opts](const std::string& m) { opts.score_mode = m; },
      "neg_min_dist or one_minus_u (overrides config)");
}

ucdsc::RunConfig load_config(const CommonOpts& opts) {
  ucdsc::RunConfig cfg =
      ucdsc::parse_run_config(ucdsc::read_json_file(opts.config_path));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.score_mode) {
    cfg.score_mode = ucdsc::score_mode_from_string(*opts.score_mode);
  }
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (cfg.out_dir.empty()) {
    throw ucdsc::ConfigError("no output directory: set out_dir or pass --out");
  }
  return cfg;
}

int simplex_check(int num_classes, int feature_dim, double radius) {
  const ucdsc::SimplexCenters centers =
      ucdsc::build_simplex(num_classes, feature_dim, radius);
  const ucdsc::SimplexDeviations dev =
      ucdsc::measure_deviations(centers.vertices, centers.radius);
  const double target_dot = -radius * radius / (num_classes - 1);
  std::printf("C=%d d=%d r=%s\n", num_classes, feature_dim,
              ucdsc::format_double(radius).c_str());
  std::printf("pairwise dot target   %s\n",
              ucdsc::format_double(target_dot).c_str());
  std::printf("max equinorm dev      %.3e (relative)\n", dev.equinorm);
  std::printf("max equiangular dev   %.3e (relative)\n", dev.equiangular);
  std::printf("center-sum norm       %.3e (relative)\n", dev.zero_sum);
  if (dev.max() > 1e-9) {
    std::printf("FAIL: deviations above 1e-9\n");
    return kExitRuntime;
  }
  std::printf("OK\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simplex-anchored open-set recognition: train a feature "
               "extractor against fixed simplex class centers and evaluate "
               "ACC/AUROC/OSCR"};
  app.require_subcommand(1);

  int sc_classes = 0;
  int sc_dim = 0;
  double sc_radius = 0.0;
  auto* sc = app.add_subcommand(
      "simplex-check", "verify simplex center invariants for (C, d, r)");
  sc->add_option("-C,--num-classes", sc_classes, "number of classes")
      ->required();
  sc->add_option("-d,--feature-dim", sc_dim, "feature dimension")->required();
  sc->add_option("-r,--radius", sc_radius, "hypersphere radius")->required();

  CommonOpts train_opts;
  auto* train_cmd = app.add_subcommand(
      "train", "train a model; writes model.json, centers.json, "
               "loss_history.csv");
  add_common(train_cmd, train_opts, true);

  CommonOpts eval_opts;
  std::string checkpoint_path;
  auto* eval_cmd = app.add_subcommand(
      "eval", "evaluate a checkpoint; writes metrics.json, roc.csv, oscr.csv");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "model.json path")
      ->required();
  add_common(eval_cmd, eval_opts, true);

  CommonOpts trials_opts;
  auto* trials_cmd = app.add_subcommand(
      "trials", "run the K-trial random-split protocol; writes trial_<k>/ "
                "directories and summary.json");
  add_common(trials_cmd, trials_opts, true);

  CommonOpts ablate_opts;
  auto* ablate_cmd = app.add_subcommand(
      "ablate", "sweep a hyperparameter grid; writes ablation.csv");
  add_common(ablate_cmd, ablate_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sc->parsed()) {
      return simplex_check(sc_classes, sc_dim, sc_radius);
    }
    if (train_cmd->parsed()) {
      const ucdsc::RunConfig cfg = load_config(train_opts);
      ucdsc::run_train(cfg, cfg.out_dir);
      std::printf("wrote %s\n", cfg.out_dir.c_str());
      return kExitOk;
    }
    if (eval_cmd->parsed()) {
      const ucdsc::RunConfig cfg = load_config(eval_opts);
      const ucdsc::TrialMetrics m =
          ucdsc::run_eval(checkpoint_path, cfg, cfg.out_dir);
      std::printf("acc   %s\nauroc %s\noscr  %s\nwrote %s\n",
                  ucdsc::format_double(m.acc).c_str(),
                  ucdsc::format_double(m.auroc).c_str(),
                  ucdsc::format_double(m.oscr).c_str(), cfg.out_dir.c_str());
      return kExitOk;
    }
    if (trials_cmd->parsed()) {
      const ucdsc::RunConfig cfg = load_config(trials_opts);
      const ucdsc::MetricsReport report =
          ucdsc::run_trials(cfg, std::filesystem::path(cfg.out_dir));
      std::printf("trials %zu\nmean acc   %s\nmean auroc %s\nmean oscr  %s\n"
                  "wrote %s\n",
                  report.trials.size(),
                  ucdsc::format_double(report.mean.acc).c_str(),
                  ucdsc::format_double(report.mean.auroc).c_str(),
                  ucdsc::format_double(report.mean.oscr).c_str(),
                  cfg.out_dir.c_str());
      return kExitOk;
    }
    if (ablate_cmd->parsed()) {
      ucdsc::AblationGrid grid = ucdsc::parse_ablation_grid(
          ucdsc::read_json_file(ablate_opts.config_path));
      if (ablate_opts.seed) grid.base.seed = *ablate_opts.seed;
      if (ablate_opts.score_mode) {
        grid.base.score_mode =
            ucdsc::score_mode_from_string(*ablate_opts.score_mode);
      }
      std::string out = !ablate_opts.out_dir.empty() ? ablate_opts.out_dir
                                                     : grid.base.out_dir;
      if (out.empty()) {
        throw ucdsc::ConfigError(
            "no output directory: set base.out_dir or pass --out");
      }
      ucdsc::run_ablate(grid, out);
      std::printf("wrote %s/ablation.csv\n", out.c_str());
      return kExitOk;
    }
  } catch (const ucdsc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid arguments: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
