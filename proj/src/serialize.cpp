#include "ucdsc/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ucdsc {

namespace {

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw std::runtime_error(std::string(what) +
                             " must be a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || row.size() != cols) {
      throw std::runtime_error(std::string(what) + " rows must share a width");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row.at(c).get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json trial_to_json(const TrialMetrics& t) {
  return Json{{"acc", t.acc}, {"auroc", t.auroc}, {"oscr", t.oscr}};
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return Json(value).dump();
}

Json centers_to_json(const SimplexCenters& centers) {
  return Json{{"num_classes", centers.num_classes},
              {"feature_dim", centers.feature_dim},
              {"radius", centers.radius},
              {"vertices", matrix_to_json(centers.vertices)}};
}

SimplexCenters centers_from_json(const Json& j) {
  return make_centers(j.at("num_classes").get<int>(),
                      j.at("feature_dim").get<int>(),
                      j.at("radius").get<double>(),
                      matrix_from_json(j.at("vertices"), "vertices"));
}

Json checkpoint_to_json(const Checkpoint& ckpt) {
  Json weights = Json::array();
  Json biases = Json::array();
  for (std::size_t l = 0; l < ckpt.model.num_layers(); ++l) {
    weights.push_back(matrix_to_json(ckpt.model.weights[l]));
    Json b = Json::array();
    for (Eigen::Index i = 0; i < ckpt.model.biases[l].size(); ++i) {
      b.push_back(ckpt.model.biases[l](i));
    }
    biases.push_back(std::move(b));
  }
  return Json{{"layer_dims", ckpt.model.layer_dims},
              {"weights", std::move(weights)},
              {"biases", std::move(biases)},
              {"expand_factor", ckpt.expand_factor},
              {"num_classes", ckpt.num_classes}};
}

Checkpoint checkpoint_from_json(const Json& j) {
  Checkpoint ckpt;
  ckpt.model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
  if (ckpt.model.layer_dims.size() < 2) {
    throw std::runtime_error("checkpoint layer_dims too short");
  }
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (weights.size() + 1 != ckpt.model.layer_dims.size() ||
      biases.size() != weights.size()) {
    throw std::runtime_error("checkpoint layer count mismatch");
  }
  for (std::size_t l = 0; l + 1 < ckpt.model.layer_dims.size(); ++l) {
    Matrix w = matrix_from_json(weights.at(l), "weights");
    if (w.rows() != ckpt.model.layer_dims[l + 1] ||
        w.cols() != ckpt.model.layer_dims[l]) {
      throw std::runtime_error("checkpoint weight shape mismatch at layer " +
                               std::to_string(l));
    }
    const auto& bj = biases.at(l);
    Vector b(static_cast<Eigen::Index>(bj.size()));
    if (b.size() != ckpt.model.layer_dims[l + 1]) {
      throw std::runtime_error("checkpoint bias shape mismatch at layer " +
                               std::to_string(l));
    }
    for (std::size_t i = 0; i < bj.size(); ++i) {
      b(static_cast<Eigen::Index>(i)) = bj.at(i).get<double>();
    }
    ckpt.model.weights.push_back(std::move(w));
    ckpt.model.biases.push_back(std::move(b));
  }
  ckpt.expand_factor = j.at("expand_factor").get<double>();
  ckpt.num_classes = j.at("num_classes").get<int>();
  if (ckpt.num_classes < 2 || !(ckpt.expand_factor > 0.0)) {
    throw std::runtime_error("checkpoint has invalid simplex parameters");
  }
  return ckpt;
}

Json report_to_json(const MetricsReport& report) {
  Json trials = Json::array();
  for (const auto& t : report.trials) trials.push_back(trial_to_json(t));
  return Json{{"trials", std::move(trials)},
              {"mean", trial_to_json(report.mean)}};
}

std::string curve_to_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "threshold,x,y\n";
  for (const auto& p : curve) {
    out << format_double(p.threshold) << ',' << format_double(p.x) << ','
        << format_double(p.y) << '\n';
  }
  return out.str();
}

std::string history_to_csv(const std::vector<EpochLoss>& history) {
  std::ostringstream out;
  out << "epoch,mean_total,mean_intra,mean_outlier,mean_uncertainty\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    out << e << ',' << format_double(history[e].total) << ','
        << format_double(history[e].intra) << ','
        << format_double(history[e].outlier) << ','
        << format_double(history[e].uncertainty) << '\n';
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw std::runtime_error("failed while writing " + path.string());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace ucdsc
