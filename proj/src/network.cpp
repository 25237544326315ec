#include "ucdsc/network.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ucdsc/rng.hpp"

namespace ucdsc {

namespace {

constexpr std::uint64_t kBatchStreamSalt = 0xb47c45a1b47c45a1ULL;

void check_shapes(const MlpModel& model, const Gradients& grads) {
  if (grads.weights.size() != model.weights.size() ||
      grads.biases.size() != model.biases.size()) {
    throw std::invalid_argument("gradient layer count does not match model");
  }
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (grads.weights[l].rows() != model.weights[l].rows() ||
        grads.weights[l].cols() != model.weights[l].cols() ||
        grads.biases[l].size() != model.biases[l].size()) {
      throw std::invalid_argument("gradient shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
}

}  // namespace

MlpModel init_model(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("layer_dims needs at least input and output");
  }
  for (const int d : layer_dims) {
    if (d < 1) throw std::invalid_argument("layer dimensions must be >= 1");
  }
  MlpModel model;
  model.layer_dims = layer_dims;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double std_dev = std::sqrt(2.0 / fan_in);
    Matrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = std_dev * rng.normal();
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Vector::Zero(fan_out));
  }
  return model;
}

std::pair<Matrix, ForwardCache> forward(const MlpModel& model,
                                        const Matrix& inputs) {
  if (inputs.cols() != model.input_dim()) {
    throw std::invalid_argument("input width " + std::to_string(inputs.cols()) +
                                " does not match model input dim " +
                                std::to_string(model.input_dim()));
  }
  ForwardCache cache;
  Matrix act = inputs;
  const std::size_t layers = model.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    cache.layer_inputs.push_back(act);
    Matrix pre = (act * model.weights[l].transpose()).rowwise() +
                 model.biases[l].transpose();
    cache.pre_activations.push_back(pre);
    act = (l + 1 == layers) ? std::move(pre) : pre.cwiseMax(0.0);
  }
  return {std::move(act), std::move(cache)};
}

Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   const Matrix& grad_features) {
  const std::size_t layers = model.num_layers();
  if (cache.layer_inputs.size() != layers ||
      cache.pre_activations.size() != layers) {
    throw std::invalid_argument("cache does not match model layer count");
  }
  if (grad_features.rows() != cache.pre_activations.back().rows() ||
      grad_features.cols() != cache.pre_activations.back().cols()) {
    throw std::invalid_argument("upstream gradient shape does not match cache");
  }

  Gradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  Matrix delta = grad_features;  // identity output layer
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = delta.transpose() * cache.layer_inputs[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix upstream = delta * model.weights[l];
      // rectifier derivative: 1 for strictly positive pre-activations
      delta = upstream.cwiseProduct(
          (cache.pre_activations[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

Gradients zero_gradients(const MlpModel& model) {
  Gradients grads;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    grads.weights.push_back(
        Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    grads.biases.push_back(Vector::Zero(model.biases[l].size()));
  }
  return grads;
}

void accumulate(Gradients& into, const Gradients& other) {
  if (into.weights.size() != other.weights.size()) {
    throw std::invalid_argument("gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < into.weights.size(); ++l) {
    into.weights[l] += other.weights[l];
    into.biases[l] += other.biases[l];
  }
}

RmsPropState init_rmsprop(const MlpModel& model, double learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  RmsPropState state;
  state.learning_rate = learning_rate;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    state.w_square_avg.push_back(
        Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    state.w_momentum.push_back(
        Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    state.b_square_avg.push_back(Vector::Zero(model.biases[l].size()));
    state.b_momentum.push_back(Vector::Zero(model.biases[l].size()));
  }
  return state;
}

void rmsprop_step(MlpModel& model, RmsPropState& state,
                  const Gradients& grads) {
  check_shapes(model, grads);
  if (state.w_square_avg.size() != model.weights.size()) {
    throw std::invalid_argument("optimizer state does not match model");
  }
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    Matrix g = grads.weights[l] + state.weight_decay * model.weights[l] +
               state.l1_penalty *
                   model.weights[l].array().sign().matrix();
    state.w_square_avg[l] = state.alpha * state.w_square_avg[l] +
                            (1.0 - state.alpha) * g.cwiseProduct(g);
    state.w_momentum[l] =
        state.momentum * state.w_momentum[l] +
        g.cwiseQuotient(
            (state.w_square_avg[l].array() + state.eps).sqrt().matrix());
    model.weights[l] -= state.learning_rate * state.w_momentum[l];

    // penalties do not touch biases
    const Vector& gb = grads.biases[l];
    state.b_square_avg[l] = state.alpha * state.b_square_avg[l] +
                            (1.0 - state.alpha) * gb.cwiseProduct(gb);
    state.b_momentum[l] =
        state.momentum * state.b_momentum[l] +
        gb.cwiseQuotient(
            (state.b_square_avg[l].array() + state.eps).sqrt().matrix());
    model.biases[l] -= state.learning_rate * state.b_momentum[l];
  }
}

TrainResult train(const LabeledDataset& data, const Matrix& background_pool,
                  const TrainConfig& config) {
  if (data.samples.rows() < 1) {
    throw std::invalid_argument("training dataset is empty");
  }
  if (config.layer_dims.size() < 2) {
    throw std::invalid_argument("layer_dims needs at least input and output");
  }
  if (config.layer_dims.front() != data.samples.cols()) {
    throw std::invalid_argument("network input dim does not match data dim");
  }
  if (config.epochs < 1 || config.batch_size < 1) {
    throw std::invalid_argument("epochs and batch_size must be >= 1");
  }
  const int num_classes = data.num_classes;
  const int feature_dim = config.layer_dims.back();
  if (feature_dim < num_classes - 1) {
    throw std::invalid_argument(
        "feature_dim must satisfy d >= C-1: d=" + std::to_string(feature_dim) +
        ", C=" + std::to_string(num_classes));
  }
  for (const int label : data.labels) {
    if (label < 0 || label >= num_classes) {
      throw std::invalid_argument(
          "training labels must be remapped to [0, num_classes)");
    }
  }
  const bool use_background = config.weights.lambda_o > 0.0;
  if (use_background) {
    if (background_pool.rows() < 1) {
      throw std::invalid_argument(
          "background pool required when lambda_o > 0");
    }
    if (background_pool.cols() != data.samples.cols()) {
      throw std::invalid_argument(
          "background pool width does not match data dim");
    }
  }

  TrainResult result;
  result.centers =
      build_simplex(num_classes, feature_dim, config.expand_factor);
  result.model = init_model(config.layer_dims, config.seed);
  RmsPropState state = init_rmsprop(result.model, config.learning_rate);
  Rng stream(mix_seed(config.seed ^ kBatchStreamSalt));

  const Eigen::Index n = data.samples.rows();
  const int bg_per_batch = config.background_per_batch > 0
                               ? config.background_per_batch
                               : config.batch_size;
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  result.history.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    stream.shuffle(order);
    EpochLoss sums;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index count = std::min<Eigen::Index>(config.batch_size,
                                                        n - start);
      FeatureBatch batch;
      Matrix inputs(count, data.samples.cols());
      batch.labels.resize(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        inputs.row(i) = data.samples.row(order[start + i]);
        batch.labels[i] = data.labels[order[start + i]];
      }
      auto [features, cache] = forward(result.model, inputs);
      batch.features = std::move(features);

      LossTerms terms;
      LossValue loss;
      Gradients grads;
      if (use_background) {
        Matrix bg_inputs(bg_per_batch, data.samples.cols());
        for (int i = 0; i < bg_per_batch; ++i) {
          bg_inputs.row(i) = background_pool.row(static_cast<Eigen::Index>(
              stream.index(static_cast<std::size_t>(background_pool.rows()))));
        }
        auto [bg_features, bg_cache] = forward(result.model, bg_inputs);
        loss = total_loss(batch, bg_features, result.centers, config.weights,
                          &terms);
        grads = backward(result.model, cache, loss.grad_features);
        accumulate(grads,
                   backward(result.model, bg_cache, *loss.grad_background));
      } else {
        loss = total_loss(batch, Matrix(0, feature_dim), result.centers,
                          config.weights, &terms);
        grads = backward(result.model, cache, loss.grad_features);
      }
      rmsprop_step(result.model, state, grads);

      const double w = static_cast<double>(count);
      sums.total += w * loss.value;
      sums.intra += w * terms.intra;
      sums.outlier += w * terms.outlier;
      sums.uncertainty += w * terms.uncertainty;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    result.history.push_back({sums.total * inv_n, sums.intra * inv_n,
                              sums.outlier * inv_n,
                              sums.uncertainty * inv_n});
  }
  return result;
}

}  // namespace ucdsc
