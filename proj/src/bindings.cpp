#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ucdsc/data.hpp"
#include "ucdsc/losses.hpp"
#include "ucdsc/metrics.hpp"
#include "ucdsc/network.hpp"
#include "ucdsc/simplex.hpp"

namespace py = pybind11;
using namespace ucdsc;

namespace {

FeatureBatch make_batch(const Matrix& features, const std::vector<int>& labels) {
  return FeatureBatch{features, labels};
}

py::dict loss_to_dict(const LossValue& loss) {
  py::dict d;
  d["value"] = loss.value;
  d["grad_features"] = loss.grad_features;
  if (loss.grad_background) d["grad_background"] = *loss.grad_background;
  return d;
}

void bind_simplex(py::module_& m) {
  py::class_<SimplexCenters>(m, "SimplexCenters")
      .def_readonly("num_classes", &SimplexCenters::num_classes)
      .def_readonly("feature_dim", &SimplexCenters::feature_dim)
      .def_readonly("radius", &SimplexCenters::radius)
      .def_readonly("vertices", &SimplexCenters::vertices);

  m.def("build_simplex", &build_simplex, py::arg("num_classes"),
        py::arg("feature_dim"), py::arg("radius"),
        "Regular simplex class centers on the radius-r hypersphere.");
  m.def("make_centers", &make_centers, py::arg("num_classes"),
        py::arg("feature_dim"), py::arg("radius"), py::arg("vertices"));
  m.def(
      "nearest_center",
      [](const Vector& f, const SimplexCenters& c) {
        const NearestCenter n = nearest_center(f, c);
        return py::make_tuple(n.index, n.sq_dist);
      },
      py::arg("feature"), py::arg("centers"),
      "(index, squared distance) of the closest center; ties take the "
      "lowest index.");
  m.def("uncertainty_ratio", &uncertainty_ratio, py::arg("feature"),
        py::arg("centers"),
        "Nearest-center distance over mean distance to the other centers.");
}

void bind_losses(py::module_& m) {
  m.def(
      "intra_loss",
      [](const Matrix& features, const std::vector<int>& labels,
         const SimplexCenters& centers) {
        return loss_to_dict(intra_loss(make_batch(features, labels), centers));
      },
      py::arg("features"), py::arg("labels"), py::arg("centers"));
  m.def(
      "outlier_loss",
      [](const Matrix& features, const std::vector<int>& labels,
         const Matrix& background, const SimplexCenters& centers,
         double margin) {
        return loss_to_dict(outlier_loss(make_batch(features, labels),
                                         background, centers, margin));
      },
      py::arg("features"), py::arg("labels"), py::arg("background"),
      py::arg("centers"), py::arg("margin"));
  m.def(
      "uncertainty_loss",
      [](const Matrix& features, const std::vector<int>& labels,
         const SimplexCenters& centers) {
        return loss_to_dict(
            uncertainty_loss(make_batch(features, labels), centers));
      },
      py::arg("features"), py::arg("labels"), py::arg("centers"));
  m.def(
      "total_loss",
      [](const Matrix& features, const std::vector<int>& labels,
         const Matrix& background, const SimplexCenters& centers,
         double lambda_o, double lambda_u, double margin) {
        LossTerms terms;
        LossValue loss =
            total_loss(make_batch(features, labels), background, centers,
                       LossWeights{lambda_o, lambda_u, margin}, &terms);
        py::dict d = loss_to_dict(loss);
        d["intra"] = terms.intra;
        d["outlier"] = terms.outlier;
        d["uncertainty"] = terms.uncertainty;
        return d;
      },
      py::arg("features"), py::arg("labels"), py::arg("background"),
      py::arg("centers"), py::arg("lambda_o") = 1.0, py::arg("lambda_u") = 5.0,
      py::arg("margin") = 38.0);
}

void bind_network(py::module_& m) {
  py::class_<MlpModel>(m, "MlpModel")
      .def_readonly("layer_dims", &MlpModel::layer_dims)
      .def_readonly("weights", &MlpModel::weights)
      .def_readonly("biases", &MlpModel::biases);

  m.def("init_model", &init_model, py::arg("layer_dims"), py::arg("seed"));
  m.def(
      "forward",
      [](const MlpModel& model, const Matrix& inputs) {
        return forward(model, inputs).first;
      },
      py::arg("model"), py::arg("inputs"),
      "Embeds a batch of input rows into feature space.");
  m.def(
      "train",
      [](const Matrix& samples, const std::vector<int>& labels,
         int num_classes, const Matrix& background,
         const std::vector<int>& layer_dims, int epochs, int batch_size,
         double learning_rate, std::uint64_t seed, double lambda_o,
         double lambda_u, double margin, double expand_factor,
         int background_per_batch) {
        LabeledDataset data{samples, labels, num_classes};
        TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.batch_size = batch_size;
        cfg.learning_rate = learning_rate;
        cfg.seed = seed;
        cfg.weights = LossWeights{lambda_o, lambda_u, margin};
        cfg.expand_factor = expand_factor;
        cfg.background_per_batch = background_per_batch;
        cfg.layer_dims = layer_dims;
        TrainResult result = train(data, background, cfg);
        std::vector<std::vector<double>> history;
        history.reserve(result.history.size());
        for (const auto& e : result.history) {
          history.push_back({e.total, e.intra, e.outlier, e.uncertainty});
        }
        return py::make_tuple(result.model, result.centers, history);
      },
      py::arg("samples"), py::arg("labels"), py::arg("num_classes"),
      py::arg("background"), py::arg("layer_dims"), py::arg("epochs") = 200,
      py::arg("batch_size") = 512, py::arg("learning_rate") = 0.01,
      py::arg("seed") = 0, py::arg("lambda_o") = 1.0,
      py::arg("lambda_u") = 5.0, py::arg("margin") = 38.0,
      py::arg("expand_factor") = 100.0, py::arg("background_per_batch") = 0,
      "Trains the feature extractor; returns (model, centers, history) "
      "where history rows are [total, intra, outlier, uncertainty].");
}

void bind_data(py::module_& m) {
  m.def(
      "generate_blobs",
      [](int num_classes, int dim, int samples_per_class, double center_scale,
         double noise_std, std::uint64_t seed) {
        const LabeledDataset ds = generate_blobs(
            SyntheticSpec{num_classes, dim, samples_per_class, center_scale,
                          noise_std},
            seed);
        return py::make_tuple(ds.samples, ds.labels);
      },
      py::arg("num_classes"), py::arg("dim"), py::arg("samples_per_class"),
      py::arg("center_scale") = 10.0, py::arg("noise_std") = 1.0,
      py::arg("seed") = 0);
  m.def("generate_background", &generate_background, py::arg("count"),
        py::arg("dim"), py::arg("low") = -1.0, py::arg("high") = 1.0,
        py::arg("seed") = 0);
  m.def(
      "make_trials",
      [](int total_classes, int num_known, int num_trials,
         std::uint64_t seed) {
        std::vector<py::tuple> out;
        for (const auto& s :
             make_trials(total_classes, num_known, num_trials, seed)) {
          out.push_back(py::make_tuple(s.known_classes, s.unknown_classes));
        }
        return out;
      },
      py::arg("total_classes"), py::arg("num_known"), py::arg("num_trials"),
      py::arg("seed") = 0,
      "List of (known_classes, unknown_classes) tuples.");
}

void bind_metrics(py::module_& m) {
  m.attr("UNKNOWN_LABEL") = kUnknownLabel;
  m.def(
      "score_samples",
      [](const Matrix& features, const SimplexCenters& centers,
         const std::string& mode, const std::vector<int>& truths) {
        const auto preds = score_samples(
            features, centers, score_mode_from_string(mode), truths);
        std::vector<double> scores;
        std::vector<int> predicted;
        for (const auto& p : preds) {
          scores.push_back(p.score);
          predicted.push_back(p.predicted);
        }
        return py::make_tuple(scores, predicted);
      },
      py::arg("features"), py::arg("centers"),
      py::arg("mode") = "neg_min_dist",
      py::arg("truths") = std::vector<int>{},
      "(scores, predicted) per row; higher score means more known.");

  const auto to_preds = [](const std::vector<double>& scores,
                           const std::vector<int>& predicted,
                           const std::vector<int>& truths) {
    if (scores.size() != predicted.size() || scores.size() != truths.size()) {
      throw std::invalid_argument(
          "scores, predicted, and truths must have equal length");
    }
    std::vector<ScoredPrediction> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      preds[i] = {scores[i], predicted[i], truths[i]};
    }
    return preds;
  };

  m.def(
      "closed_set_accuracy",
      [to_preds](const std::vector<double>& scores,
                 const std::vector<int>& predicted,
                 const std::vector<int>& truths) {
        return closed_set_accuracy(to_preds(scores, predicted, truths));
      },
      py::arg("scores"), py::arg("predicted"), py::arg("truths"));
  m.def(
      "auroc",
      [to_preds](const std::vector<double>& scores,
                 const std::vector<int>& truths) {
        return auroc(
            to_preds(scores, std::vector<int>(scores.size(), 0), truths));
      },
      py::arg("scores"), py::arg("truths"),
      "Known-vs-unknown ranking quality; truths use UNKNOWN_LABEL (-1) for "
      "unknowns.");
  m.def(
      "oscr",
      [to_preds](const std::vector<double>& scores,
                 const std::vector<int>& predicted,
                 const std::vector<int>& truths) {
        const OscrResult r = oscr(to_preds(scores, predicted, truths));
        std::vector<std::vector<double>> curve;
        for (const auto& p : r.curve) curve.push_back({p.threshold, p.x, p.y});
        return py::make_tuple(r.area, curve);
      },
      py::arg("scores"), py::arg("predicted"), py::arg("truths"),
      "(area, curve) with curve rows [threshold, fpr, ccr].");
  m.def(
      "roc_points",
      [to_preds](const std::vector<double>& scores,
                 const std::vector<int>& truths) {
        const auto pts = roc_points(
            to_preds(scores, std::vector<int>(scores.size(), 0), truths));
        std::vector<std::vector<double>> curve;
        for (const auto& p : pts) curve.push_back({p.threshold, p.x, p.y});
        return curve;
      },
      py::arg("scores"), py::arg("truths"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Open-set recognition with fixed simplex class centers: losses, "
            "training, and evaluation metrics.";
  bind_simplex(m);
  bind_losses(m);
  bind_network(m);
  bind_data(m);
  bind_metrics(m);
}
