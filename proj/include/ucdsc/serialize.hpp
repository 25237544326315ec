#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucdsc/metrics.hpp"
#include "ucdsc/network.hpp"
#include "ucdsc/simplex.hpp"

namespace ucdsc {

using Json = nlohmann::json;

// Shortest round-trip decimal rendering; deterministic, so repeated runs
// produce byte-identical files. Infinities render as "inf"/"-inf".
std::string format_double(double value);

Json centers_to_json(const SimplexCenters& centers);
SimplexCenters centers_from_json(const Json& j);  // re-validates invariants

// Model checkpoint together with the simplex parameters needed to rebuild
// the centers at evaluation time.
struct Checkpoint {
  MlpModel model;
  double expand_factor = 0.0;
  int num_classes = 0;
};

Json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const Json& j);

Json report_to_json(const MetricsReport& report);

// "threshold,x,y" rows.
std::string curve_to_csv(const std::vector<CurvePoint>& curve);

// "epoch,mean_total,mean_intra,mean_outlier,mean_uncertainty" rows.
std::string history_to_csv(const std::vector<EpochLoss>& history);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

}  // namespace ucdsc
