#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ucdsc/types.hpp"

namespace ucdsc {

// Row-per-sample dataset with dense integer labels. Test views produced by
// relabel_for_trial may carry kUnknownLabel for samples outside the known
// set; everywhere else labels lie in [0, num_classes).
struct LabeledDataset {
  Matrix samples;           // N x dim
  std::vector<int> labels;  // N entries
  int num_classes = 0;
};

struct SyntheticSpec {
  int num_classes = 0;
  int dim = 0;
  int samples_per_class = 0;
  double center_scale = 0.0;
  double noise_std = 0.0;
};

// Isotropic Gaussian blobs: class c gets samples_per_class points with
// standard deviation noise_std around a seeded random center of norm
// center_scale. Deterministic per seed.
LabeledDataset generate_blobs(const SyntheticSpec& spec, std::uint64_t seed);

// count x dim matrix of i.i.d. uniform entries in [low, high).
Matrix generate_background(int count, int dim, double low, double high,
                           std::uint64_t seed);

// One random known/unknown partition of the class ids. known_classes keeps
// the sampled order (it defines the relabeling); unknown_classes is sorted.
struct TrialSplit {
  std::vector<int> known_classes;
  std::vector<int> unknown_classes;
  int trial_index = 0;
  std::uint64_t seed = 0;
};

// num_trials independent splits, each choosing num_known classes uniformly
// at random; the remainder become unknown. Split k carries seed + k.
std::vector<TrialSplit> make_trials(int total_classes, int num_known,
                                    int num_trials, std::uint64_t seed);

struct TrialViews {
  LabeledDataset train;  // known classes only, remapped labels, 80% per class
  LabeledDataset test;   // remaining 20% of knowns plus all unknown samples
};

// Remaps known classes to [0, C) in split order and carves a seeded 80/20
// train/test split per known class (test share rounded down). Unknown-class
// samples appear only in the test view with label kUnknownLabel.
TrialViews relabel_for_trial(const LabeledDataset& dataset,
                             const TrialSplit& split);

struct CsvDataset {
  LabeledDataset dataset;
  std::map<long, int> label_map;  // original label -> dense label
  bool remapped = false;          // true when original labels were not dense
};

// Header-less CSV: integer label first, then the feature values. Labels are
// remapped to a dense [0, C) range when necessary; the mapping is returned
// so callers can persist it.
CsvDataset load_csv(const std::string& path);

// Inverse of load_csv up to exact decimal rendering (%.17g round-trips).
void save_csv(const LabeledDataset& dataset, const std::string& path);

}  // namespace ucdsc
