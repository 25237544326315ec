#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ucdsc/data.hpp"
#include "ucdsc/losses.hpp"
#include "ucdsc/simplex.hpp"
#include "ucdsc/types.hpp"

namespace ucdsc {

// Fully connected feature extractor: rectified-linear hidden layers, identity
// output. weights[l] is dims[l+1] x dims[l]; biases[l] has dims[l+1] entries.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t num_layers() const { return weights.size(); }
};

// Per-layer inputs and pre-activations recorded by forward for backward.
struct ForwardCache {
  std::vector<Matrix> layer_inputs;     // activation entering each layer
  std::vector<Matrix> pre_activations;  // affine outputs before the nonlinearity
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// He-scaled init: weight entries drawn N(0, 2/fan_in), biases zero.
// Bit-identical for identical (layer_dims, seed).
MlpModel init_model(const std::vector<int>& layer_dims, std::uint64_t seed);

// Embeds a batch (rows are samples). The cache feeds backward.
std::pair<Matrix, ForwardCache> forward(const MlpModel& model,
                                        const Matrix& inputs);

// Backpropagates an upstream gradient w.r.t. the output features into
// gradients for every weight and bias.
Gradients backward(const MlpModel& model, const ForwardCache& cache,
                   const Matrix& grad_features);

Gradients zero_gradients(const MlpModel& model);
void accumulate(Gradients& into, const Gradients& other);

// RMSProp with momentum on the normalized gradient. Decay penalties apply to
// weights only:
//   g   <- g + weight_decay * w + l1_penalty * sign(w)
//   sq  <- alpha * sq + (1 - alpha) * g^2
//   buf <- momentum * buf + g / sqrt(sq + eps)
//   w   <- w - learning_rate * buf
struct RmsPropState {
  double learning_rate = 0.01;
  double alpha = 0.95;
  double eps = 1e-6;
  double momentum = 0.9;
  double weight_decay = 1e-3;
  double l1_penalty = 1e-3;
  std::vector<Matrix> w_square_avg;
  std::vector<Matrix> w_momentum;
  std::vector<Vector> b_square_avg;
  std::vector<Vector> b_momentum;
};

RmsPropState init_rmsprop(const MlpModel& model, double learning_rate);
void rmsprop_step(MlpModel& model, RmsPropState& state, const Gradients& grads);

struct TrainConfig {
  int epochs = 200;
  int batch_size = 512;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  LossWeights weights;
  double expand_factor = 100.0;
  int background_per_batch = 0;  // 0 means "same as batch_size"
  std::vector<int> layer_dims;   // [input_dim, hidden..., feature_dim]
};

// Mean loss terms over one epoch, weighted by batch size.
struct EpochLoss {
  double total = 0.0;
  double intra = 0.0;
  double outlier = 0.0;
  double uncertainty = 0.0;
};

struct TrainResult {
  MlpModel model;
  SimplexCenters centers;
  std::vector<EpochLoss> history;
};

// Full training loop: builds the simplex from (num_classes, feature_dim,
// expand_factor), then runs seeded-shuffled mini-batches. Each step embeds
// the known batch and a background draw with the same model, combines the
// losses, backpropagates through both paths, and applies one optimizer step.
// Fully deterministic per config seed. The background pool holds raw
// input-space samples and may be empty only when lambda_o is zero.
TrainResult train(const LabeledDataset& data, const Matrix& background_pool,
                  const TrainConfig& config);

}  // namespace ucdsc
