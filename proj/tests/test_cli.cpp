// Exit-code and file-output checks against the installed binary. Takes the
// binary path as argv[1] and runs each scenario through std::system.
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::printf("FAIL: %s\n", what.c_str());
    ++failures;
  }
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: test_cli <path-to-ucdsc>\n");
    return 1;
  }
  const std::string bin = argv[1];
  const fs::path work = fs::temp_directory_path() / "ucdsc_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);

  expect(run(bin + " --help") == 0, "--help exits 0");
  expect(run(bin) == 2, "missing subcommand exits 2");
  expect(run(bin + " simplex-check -C 3 -d 2 -r 1") == 0,
         "valid simplex-check exits 0");
  expect(run(bin + " simplex-check -C 64 -d 63 -r 100") == 0,
         "large simplex-check exits 0");
  expect(run(bin + " simplex-check -C 3 -d 1 -r 1") == 2,
         "d < C-1 exits 2");
  expect(run(bin + " simplex-check -C 3 -d 2 -r -1") == 2,
         "negative radius exits 2");
  expect(run(bin + " train") == 2, "train without --config exits 2");
  expect(run(bin + " train --config /nonexistent.json --out " +
             (work / "nx").string()) == 2,
         "unreadable config exits 2");

  const fs::path cfg = work / "train.json";
  write_file(cfg, R"({
    "seed": 5,
    "dataset": {"type": "synthetic", "num_classes": 3, "dim": 3,
                "samples_per_class": 20, "center_scale": 8.0,
                "noise_std": 1.0},
    "loss": {"lambda_o": 0.0, "lambda_u": 1.0},
    "network": {"hidden_dims": [6], "feature_dim": 2},
    "train": {"epochs": 2, "batch_size": 8, "expand_factor": 5.0}
  })");
  const fs::path out = work / "run";
  expect(run(bin + " train --config " + cfg.string() + " --out " +
             out.string()) == 0,
         "train with a valid config exits 0");
  expect(fs::exists(out / "model.json") && fs::exists(out / "centers.json") &&
             fs::exists(out / "loss_history.csv"),
         "train writes model.json, centers.json, loss_history.csv");

  const fs::path bad_cfg = work / "bad.json";
  write_file(bad_cfg, R"({
    "dataset": {"type": "synthetic", "num_classes": 3, "dim": 3,
                "samples_per_class": 20},
    "loss": {"lambda_o": 1.0}
  })");
  const fs::path bad_out = work / "bad_run";
  expect(run(bin + " train --config " + bad_cfg.string() + " --out " +
             bad_out.string()) == 2,
         "lambda_o > 0 without background exits 2");
  expect(!fs::exists(bad_out), "no partial outputs on a config error");

  const fs::path typo_cfg = work / "typo.json";
  write_file(typo_cfg, R"({
    "dataset": {"type": "synthetic", "num_classes": 3, "dim": 3,
                "samples_per_class": 20},
    "loss": {"lambda_o": 0.0},
    "trian": {"epochs": 2}
  })");
  expect(run(bin + " train --config " + typo_cfg.string() + " --out " +
             (work / "typo_run").string()) == 2,
         "unknown config key exits 2");

  // eval against the checkpoint written above, with class 2 held unknown
  const fs::path eval_cfg = work / "eval.json";
  write_file(eval_cfg, R"({
    "seed": 5,
    "dataset": {"type": "synthetic", "num_classes": 3, "dim": 3,
                "samples_per_class": 20, "center_scale": 8.0,
                "noise_std": 1.0},
    "loss": {"lambda_o": 0.0, "lambda_u": 1.0},
    "network": {"hidden_dims": [6], "feature_dim": 2},
    "train": {"epochs": 2, "batch_size": 8, "expand_factor": 5.0},
    "split": {"known_classes": [0, 1]}
  })");
  const fs::path train2 = work / "run2";
  expect(run(bin + " train --config " + eval_cfg.string() + " --out " +
             train2.string()) == 0,
         "train with an explicit split exits 0");
  const fs::path eval_out = work / "eval_run";
  expect(run(bin + " eval --checkpoint " + (train2 / "model.json").string() +
             " --config " + eval_cfg.string() + " --out " +
             eval_out.string()) == 0,
         "eval exits 0");
  expect(fs::exists(eval_out / "metrics.json") &&
             fs::exists(eval_out / "roc.csv") &&
             fs::exists(eval_out / "oscr.csv"),
         "eval writes metrics.json, roc.csv, oscr.csv");

  // eval with every class known has no unknowns to score
  const fs::path eval_all_cfg = work / "eval_all.json";
  write_file(eval_all_cfg, R"({
    "seed": 5,
    "dataset": {"type": "synthetic", "num_classes": 3, "dim": 3,
                "samples_per_class": 20, "center_scale": 8.0,
                "noise_std": 1.0},
    "loss": {"lambda_o": 0.0, "lambda_u": 1.0},
    "network": {"hidden_dims": [6], "feature_dim": 2},
    "train": {"epochs": 2, "batch_size": 8, "expand_factor": 5.0},
    "split": {"known_classes": [0, 1, 2]}
  })");
  expect(run(bin + " eval --checkpoint " + (train2 / "model.json").string() +
             " --config " + eval_all_cfg.string() + " --out " +
             (work / "eval_all").string()) == 2,
         "eval without unknowns exits 2");

  // trials: K directories plus a summary
  const fs::path trials_cfg = work / "trials.json";
  write_file(trials_cfg, R"({
    "seed": 5,
    "dataset": {"type": "synthetic", "num_classes": 4, "dim": 3,
                "samples_per_class": 20, "center_scale": 8.0,
                "noise_std": 1.0},
    "loss": {"lambda_o": 0.0, "lambda_u": 1.0},
    "network": {"hidden_dims": [6], "feature_dim": 2},
    "train": {"epochs": 2, "batch_size": 8, "expand_factor": 5.0},
    "split": {"num_known": 2, "num_trials": 3}
  })");
  const fs::path trials_out = work / "trials_run";
  expect(run(bin + " trials --config " + trials_cfg.string() + " --out " +
             trials_out.string()) == 0,
         "trials exits 0");
  expect(fs::exists(trials_out / "trial_0" / "metrics.json") &&
             fs::exists(trials_out / "trial_1" / "metrics.json") &&
             fs::exists(trials_out / "trial_2" / "metrics.json") &&
             fs::exists(trials_out / "summary.json"),
         "trials writes trial_k dirs and summary.json");

  // ablate: header plus one row per cell
  const fs::path grid_cfg = work / "grid.json";
  write_file(grid_cfg, std::string(R"({
    "base": )") + R"({
    "seed": 5,
    "dataset": {"type": "synthetic", "num_classes": 4, "dim": 3,
                "samples_per_class": 20, "center_scale": 8.0,
                "noise_std": 1.0},
    "loss": {"lambda_o": 0.0, "lambda_u": 1.0},
    "network": {"hidden_dims": [6], "feature_dim": 2},
    "train": {"epochs": 2, "batch_size": 8, "expand_factor": 5.0},
    "split": {"num_known": 2, "num_trials": 1}
  },
    "grid": {"lambda_u": [0.0, 1.0, 2.0]}
  })");
  const fs::path grid_out = work / "grid_run";
  expect(run(bin + " ablate --config " + grid_cfg.string() + " --out " +
             grid_out.string()) == 0,
         "ablate exits 0");
  {
    std::ifstream csv(grid_out / "ablation.csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    expect(rows == 4, "ablation.csv has a header plus 3 rows");
  }

  fs::remove_all(work);
  if (failures == 0) {
    std::printf("test_cli: all checks passed\n");
    return 0;
  }
  std::printf("test_cli: %d check(s) failed\n", failures);
  return 1;
}
