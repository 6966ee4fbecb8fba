// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Multilayer perceptron classifiers: parameter layout, forward pass,
// softmax cross-entropy with reverse-mode gradients, Adam training.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/matrix.hpp"
#include "unlearn/pass_meter.hpp"

namespace unlearn {

enum class Activation : std::uint8_t { relu = 0 };

struct ModelSpec {
  std::vector<std::size_t> layer_dims;  // input, hidden..., K
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;

  void validate() const;
  [[nodiscard]] std::size_t num_layers() const noexcept { return layer_dims.size() - 1; }
  [[nodiscard]] std::size_t input_dim() const noexcept { return layer_dims.front(); }
  [[nodiscard]] std::size_t num_classes() const noexcept { return layer_dims.back(); }
  [[nodiscard]] std::size_t param_count() const;
};

enum class TensorRole : std::uint8_t { weight, bias };

struct Segment {
  std::size_t layer = 0;
  TensorRole role = TensorRole::weight;
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Layer-major: weight (fan_out x fan_in, row-major) then bias, per layer.
std::vector<Segment> make_layout(const ModelSpec& spec);

/// Flat view of every trainable parameter. Also used for gradients and
/// Fisher values, which share the layout.
struct ParameterVector {
  std::vector<double> values;
  std::vector<Segment> layout;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] std::span<double> segment(const Segment& s) { return {values.data() + s.offset, s.length}; }
  [[nodiscard]] std::span<const double> segment(const Segment& s) const {
    return {values.data() + s.offset, s.length};
  }
  [[nodiscard]] bool all_finite() const noexcept;
  [[nodiscard]] bool same_layout(const ParameterVector& other) const noexcept {
    return layout == other.layout && values.size() == other.values.size();
  }
};

struct Model {
  ModelSpec spec;
  ParameterVector params;
};

/// Weights ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)) from spec.seed, biases 0.
Model init_model(const ModelSpec& spec);

/// Logits, one row per input row.
Matrix forward(const Model& model, const Matrix& inputs);

struct LossGrad {
  double mean_nll = 0.0;
  ParameterVector grad;
};

/// Mean softmax cross-entropy over the whole dataset and its gradient.
LossGrad loss_and_grad(const Model& model, const Dataset& batch);
/// Same, over the rows `indices` of `data`.
LossGrad loss_and_grad(const Model& model, const Dataset& data, std::span<const std::size_t> indices);

/// g ⊙ g for the gradient g of one sample's negative log-likelihood.
ParameterVector per_sample_sq_grad(const Model& model, std::span<const double> feature, std::uint32_t label);

/// Adds Σ_n g_n ⊙ g_n over rows [begin, end) of `data` into `acc`, where g_n
/// is the per-sample nll gradient. Uses the outer-product identity
/// (δ aᵀ)² = δ² (a²)ᵀ instead of materializing each g_n.
void accumulate_per_sample_sq_grads(const Model& model, const Dataset& data, std::size_t begin,
                                    std::size_t end, std::span<double> acc);

/// Per-sample softmax cross-entropy at the true label.
std::vector<double> per_sample_nll(const Model& model, const Dataset& data);

/// Row-wise argmax, ties to the lowest class index.
std::vector<std::uint32_t> predict(const Model& model, const Matrix& inputs);

/// Fraction of rows predicted correctly. Throws ConfigError on empty data.
double accuracy(const Model& model, const Dataset& data);

struct TrainConfig {
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t shuffle_seed = 0;

  void validate() const;
};

struct TrainTrace {
  std::vector<double> epoch_mean_loss;  // averaged over the epoch's batches, pre-step
};

/// Adam from zeroed moments. Each epoch visits a fresh permutation drawn from
/// a generator seeded once with cfg.shuffle_seed. One pass per epoch is
/// recorded in `meter` under data.role.
Model train(Model model, const Dataset& data, const TrainConfig& cfg,
            PassMeter* meter = nullptr, TrainTrace* trace = nullptr);

}  // namespace unlearn
