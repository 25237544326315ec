#include "ucdsc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ucdsc/rng.hpp"

namespace ucdsc {

namespace {

constexpr std::uint64_t kEightyTwentySalt = 0x8020802080208020ULL;

void validate_spec(const SyntheticSpec& spec) {
  if (spec.num_classes < 1 || spec.dim < 1 || spec.samples_per_class < 1 ||
      !(spec.center_scale > 0.0) || !(spec.noise_std > 0.0)) {
    throw std::invalid_argument("synthetic spec fields must all be positive");
  }
}

Vector random_direction(Rng& rng, int dim) {
  Vector v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

LabeledDataset generate_blobs(const SyntheticSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  Rng rng(seed);
  Matrix centers(spec.num_classes, spec.dim);
  for (int c = 0; c < spec.num_classes; ++c) {
    centers.row(c) = spec.center_scale * random_direction(rng, spec.dim);
  }

  const int n = spec.num_classes * spec.samples_per_class;
  LabeledDataset ds;
  ds.samples = Matrix(n, spec.dim);
  ds.labels.resize(n);
  ds.num_classes = spec.num_classes;
  int row = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
      for (int j = 0; j < spec.dim; ++j) {
        ds.samples(row, j) = centers(c, j) + spec.noise_std * rng.normal();
      }
      ds.labels[row] = c;
    }
  }
  return ds;
}

Matrix generate_background(int count, int dim, double low, double high,
                           std::uint64_t seed) {
  if (count < 1 || dim < 1) {
    throw std::invalid_argument("background count and dim must be >= 1");
  }
  if (!(low < high)) {
    throw std::invalid_argument("background range requires low < high");
  }
  Rng rng(seed);
  Matrix out(count, dim);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < dim; ++j) out(i, j) = rng.uniform(low, high);
  }
  return out;
}

std::vector<TrialSplit> make_trials(int total_classes, int num_known,
                                    int num_trials, std::uint64_t seed) {
  if (num_known < 1 || num_known >= total_classes) {
    throw std::invalid_argument(
        "num_known must satisfy 1 <= num_known < total_classes");
  }
  if (num_trials < 1) {
    throw std::invalid_argument("num_trials must be >= 1");
  }
  Rng rng(seed);
  std::vector<TrialSplit> splits;
  splits.reserve(num_trials);
  std::vector<int> ids(total_classes);
  for (int k = 0; k < num_trials; ++k) {
    for (int i = 0; i < total_classes; ++i) ids[i] = i;
    rng.shuffle(ids);
    TrialSplit split;
    split.known_classes.assign(ids.begin(), ids.begin() + num_known);
    split.unknown_classes.assign(ids.begin() + num_known, ids.end());
    std::sort(split.unknown_classes.begin(), split.unknown_classes.end());
    split.trial_index = k;
    split.seed = seed + static_cast<std::uint64_t>(k);
    splits.push_back(std::move(split));
  }
  return splits;
}

TrialViews relabel_for_trial(const LabeledDataset& dataset,
                             const TrialSplit& split) {
  if (split.known_classes.empty()) {
    throw std::invalid_argument("split has no known classes");
  }
  std::set<int> seen;
  for (const auto& group : {split.known_classes, split.unknown_classes}) {
    for (const int c : group) {
      if (c < 0 || c >= dataset.num_classes) {
        throw std::invalid_argument("split references class " +
                                    std::to_string(c) +
                                    " outside the dataset");
      }
      if (!seen.insert(c).second) {
        throw std::invalid_argument(
            "split classes must be disjoint, class " + std::to_string(c) +
            " repeats");
      }
    }
  }

  std::vector<std::vector<Eigen::Index>> rows_by_class(dataset.num_classes);
  for (Eigen::Index i = 0; i < dataset.samples.rows(); ++i) {
    rows_by_class[dataset.labels[i]].push_back(i);
  }

  Rng rng(mix_seed(split.seed ^ kEightyTwentySalt));
  std::vector<std::pair<Eigen::Index, int>> train_rows;  // (row, new label)
  std::vector<std::pair<Eigen::Index, int>> test_rows;
  for (std::size_t new_label = 0; new_label < split.known_classes.size();
       ++new_label) {
    const int cls = split.known_classes[new_label];
    auto rows = rows_by_class[cls];
    if (rows.empty()) {
      throw std::invalid_argument("split references class " +
                                  std::to_string(cls) +
                                  " with no samples in the dataset");
    }
    rng.shuffle(rows);
    const std::size_t n_test = rows.size() / 5;  // floor(0.2 * n)
    std::vector<Eigen::Index> test_part(rows.begin(), rows.begin() + n_test);
    std::vector<Eigen::Index> train_part(rows.begin() + n_test, rows.end());
    std::sort(test_part.begin(), test_part.end());
    std::sort(train_part.begin(), train_part.end());
    for (const auto r : train_part) {
      train_rows.emplace_back(r, static_cast<int>(new_label));
    }
    for (const auto r : test_part) {
      test_rows.emplace_back(r, static_cast<int>(new_label));
    }
  }
  for (const int cls : split.unknown_classes) {
    for (const auto r : rows_by_class[cls]) {
      test_rows.emplace_back(r, kUnknownLabel);
    }
  }

  const auto gather = [&dataset](
                          const std::vector<std::pair<Eigen::Index, int>>& rows,
                          int num_known) {
    LabeledDataset view;
    view.samples = Matrix(static_cast<Eigen::Index>(rows.size()),
                          dataset.samples.cols());
    view.labels.resize(rows.size());
    view.num_classes = num_known;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      view.samples.row(static_cast<Eigen::Index>(i)) =
          dataset.samples.row(rows[i].first);
      view.labels[i] = rows[i].second;
    }
    return view;
  };

  TrialViews views;
  const int c = static_cast<int>(split.known_classes.size());
  views.train = gather(train_rows, c);
  views.test = gather(test_rows, c);
  return views;
}

CsvDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }

  std::vector<std::vector<double>> rows;
  std::vector<long> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (line.back() == ',') fields.push_back("");

    if (fields.size() < 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected a label and at least one feature");
    }
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw std::runtime_error(
          path + ":" + std::to_string(line_no) + ": expected " +
          std::to_string(width) + " fields, got " +
          std::to_string(fields.size()));
    }

    long label = 0;
    {
      const auto& f = fields[0];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), label);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": label '" + f + "' is not an integer");
      }
    }
    std::vector<double> values(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const auto& f = fields[j];
      const auto res =
          std::from_chars(f.data(), f.data() + f.size(), values[j - 1]);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": field '" + f + "' is not numeric");
      }
    }
    raw_labels.push_back(label);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }

  std::set<long> distinct(raw_labels.begin(), raw_labels.end());
  CsvDataset out;
  int next = 0;
  for (const long l : distinct) out.label_map[l] = next++;
  out.remapped = false;
  for (const auto& [orig, dense] : out.label_map) {
    if (orig != dense) out.remapped = true;
  }

  out.dataset.samples =
      Matrix(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(width - 1));
  out.dataset.labels.resize(rows.size());
  out.dataset.num_classes = static_cast<int>(distinct.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j) {
      out.dataset.samples(static_cast<Eigen::Index>(i),
                          static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    out.dataset.labels[i] = out.label_map.at(raw_labels[i]);
  }
  return out;
}

void save_csv(const LabeledDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  char buf[64];
  for (Eigen::Index i = 0; i < dataset.samples.rows(); ++i) {
    out << dataset.labels[i];
    for (Eigen::Index j = 0; j < dataset.samples.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.samples(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed while writing " + path);
  }
}

}  // namespace ucdsc
