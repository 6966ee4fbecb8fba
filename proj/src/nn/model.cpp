// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unlearn/error.hpp"
#include "unlearn/rng.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn {

void ModelSpec::validate() const {
  if (layer_dims.size() < 2) {
    throw ConfigError("model needs at least an input and an output dimension");
  }
  for (std::size_t d : layer_dims) {
    if (d == 0) throw ConfigError("model layer dimensions must be >= 1");
  }
  if (activation != Activation::relu) throw ConfigError("unsupported activation");
}

std::size_t ModelSpec::param_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    total += layer_dims[l] * layer_dims[l + 1] + layer_dims[l + 1];
  }
  return total;
}

std::vector<Segment> make_layout(const ModelSpec& spec) {
  spec.validate();
  std::vector<Segment> layout;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec.num_layers(); ++l) {
    const std::size_t fan_in = spec.layer_dims[l];
    const std::size_t fan_out = spec.layer_dims[l + 1];
    layout.push_back({l, TensorRole::weight, offset, fan_in * fan_out});
    offset += fan_in * fan_out;
    layout.push_back({l, TensorRole::bias, offset, fan_out});
    offset += fan_out;
  }
  return layout;
}

bool ParameterVector::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Model init_model(const ModelSpec& spec) {
  Model model{spec, {}};
  model.params.layout = make_layout(spec);
  model.params.values.assign(spec.param_count(), 0.0);
  Rng rng(spec.seed);
  for (const Segment& seg : model.params.layout) {
    if (seg.role != TensorRole::weight) continue;
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.layer_dims[seg.layer]));
    for (double& w : model.params.segment(seg)) w = rng.uniform(-bound, bound);
  }
  return model;
}

namespace {

struct LayerView {
  std::span<const double> weight;  // fan_out rows of fan_in
  std::span<const double> bias;
  std::size_t fan_in;
  std::size_t fan_out;

  [[nodiscard]] std::span<const double> row(std::size_t o) const {
    return weight.subspan(o * fan_in, fan_in);
  }
};

LayerView layer_view(const Model& model, std::size_t l) {
  const ParameterVector& p = model.params;
  return {p.segment(p.layout[2 * l]), p.segment(p.layout[2 * l + 1]),
          model.spec.layer_dims[l], model.spec.layer_dims[l + 1]};
}

void check_model(const Model& model) {
  if (model.params.values.size() != model.spec.param_count() ||
      model.params.layout.size() != 2 * model.spec.num_layers()) {
    throw ShapeError("model parameters do not match its spec");
  }
}

// acts[0] is the input batch, acts[l + 1] the output of layer l; the last
// entry holds logits.
std::vector<Matrix> forward_all(const Model& model, const Matrix& inputs) {
  check_model(model);
  if (inputs.cols != model.spec.input_dim()) {
    throw ShapeError("input dim " + std::to_string(inputs.cols) + " does not match model input dim " +
                     std::to_string(model.spec.input_dim()));
  }
  const std::size_t layers = model.spec.num_layers();
  std::vector<Matrix> acts;
  acts.reserve(layers + 1);
  acts.push_back(inputs);
  for (std::size_t l = 0; l < layers; ++l) {
    const LayerView layer = layer_view(model, l);
    const Matrix& in = acts.back();
    Matrix out(in.rows, layer.fan_out);
    const bool hidden = l + 1 < layers;
    for (std::size_t n = 0; n < in.rows; ++n) {
      const auto a = in.row(n);
      auto z = out.row(n);
      for (std::size_t o = 0; o < layer.fan_out; ++o) {
        const double v = simd::dot(layer.row(o), a) + layer.bias[o];
        z[o] = hidden ? std::max(v, 0.0) : v;
      }
    }
    acts.push_back(std::move(out));
  }
  for (double v : acts.back().values) {
    if (!std::isfinite(v)) throw NumericError("non-finite logit in forward pass");
  }
  return acts;
}

double log_sum_exp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

void check_labels(std::span<const std::uint32_t> labels, std::size_t k) {
  for (std::uint32_t y : labels) {
    if (y >= k) {
      throw ConfigError("label " + std::to_string(y) + " out of range for " + std::to_string(k) +
                        " classes");
    }
  }
}

enum class Accumulate { gradient, squared };

// Reverse pass from per-sample output deltas dL_n/dz_n. In gradient mode
// the per-sample contributions are summed into `out`; in squared mode their
// squares are summed instead, using (δ_o a_i)² = δ_o² a_i².
void backprop(const Model& model, const std::vector<Matrix>& acts, Matrix delta, Accumulate mode,
              ParameterVector& out) {
  const std::size_t layers = model.spec.num_layers();
  std::vector<double> a_sq;
  for (std::size_t l = layers; l-- > 0;) {
    const LayerView layer = layer_view(model, l);
    const Matrix& a_prev = acts[l];
    auto g_w = out.segment(out.layout[2 * l]);
    auto g_b = out.segment(out.layout[2 * l + 1]);
    Matrix delta_prev;
    if (l > 0) delta_prev = Matrix(delta.rows, layer.fan_in);
    for (std::size_t n = 0; n < delta.rows; ++n) {
      const auto a = a_prev.row(n);
      if (mode == Accumulate::squared) {
        a_sq.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) a_sq[i] = a[i] * a[i];
      }
      const auto d = delta.row(n);
      for (std::size_t o = 0; o < layer.fan_out; ++o) {
        const double d_o = d[o];
        if (d_o == 0.0) continue;
        auto g_row = g_w.subspan(o * layer.fan_in, layer.fan_in);
        if (mode == Accumulate::gradient) {
          simd::axpy(d_o, a, g_row);
          g_b[o] += d_o;
        } else {
          const double d_sq = d_o * d_o;
          simd::axpy(d_sq, a_sq, g_row);
          g_b[o] += d_sq;
        }
        if (l > 0) simd::axpy(d_o, layer.row(o), delta_prev.row(n));
      }
      if (l > 0) {
        // relu'(z) = 1 exactly where the stored activation is positive.
        auto dp = delta_prev.row(n);
        for (std::size_t i = 0; i < dp.size(); ++i) {
          if (!(a[i] > 0.0)) dp[i] = 0.0;
        }
      }
    }
    if (l > 0) delta = std::move(delta_prev);
  }
}

ParameterVector zeros_like(const Model& model) {
  ParameterVector p;
  p.layout = model.params.layout;
  p.values.assign(model.params.values.size(), 0.0);
  return p;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), m.cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = m.row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

// Softmax minus one-hot, times `scale`; returns the summed nll.
double output_delta(const Matrix& logits, std::span<const std::uint32_t> labels, double scale,
                    Matrix& delta) {
  delta = Matrix(logits.rows, logits.cols);
  double total = 0.0;
  for (std::size_t n = 0; n < logits.rows; ++n) {
    const auto z = logits.row(n);
    const double lse = log_sum_exp(z);
    auto d = delta.row(n);
    for (std::size_t k = 0; k < z.size(); ++k) d[k] = std::exp(z[k] - lse) * scale;
    d[labels[n]] -= scale;
    total += lse - z[labels[n]];
  }
  if (!std::isfinite(total)) throw NumericError("non-finite loss");
  return total;
}

LossGrad loss_and_grad_rows(const Model& model, const Matrix& x, std::span<const std::uint32_t> y) {
  if (x.rows == 0) throw ConfigError("loss_and_grad on an empty batch");
  check_labels(y, model.spec.num_classes());
  const auto acts = forward_all(model, x);
  const double scale = 1.0 / static_cast<double>(x.rows);
  Matrix delta;
  const double total = output_delta(acts.back(), y, scale, delta);
  LossGrad result{total * scale, zeros_like(model)};
  backprop(model, acts, std::move(delta), Accumulate::gradient, result.grad);
  if (!result.grad.all_finite()) throw NumericError("non-finite gradient");
  return result;
}

}  // namespace

Matrix forward(const Model& model, const Matrix& inputs) {
  auto acts = forward_all(model, inputs);
  return std::move(acts.back());
}

LossGrad loss_and_grad(const Model& model, const Dataset& batch) {
  return loss_and_grad_rows(model, batch.features, batch.labels);
}

LossGrad loss_and_grad(const Model& model, const Dataset& data, std::span<const std::size_t> indices) {
  std::vector<std::uint32_t> labels(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) labels[r] = data.labels.at(indices[r]);
  return loss_and_grad_rows(model, gather_rows(data.features, indices), labels);
}

void accumulate_per_sample_sq_grads(const Model& model, const Dataset& data, std::size_t begin,
                                    std::size_t end, std::span<double> acc) {
  if (acc.size() != model.params.values.size()) throw ShapeError("accumulator size mismatch");
  if (begin >= end) return;
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  const std::span<const std::uint32_t> y(data.labels.data() + begin, end - begin);
  check_labels(y, model.spec.num_classes());
  const auto acts = forward_all(model, gather_rows(data.features, idx));
  Matrix delta;
  output_delta(acts.back(), y, 1.0, delta);
  ParameterVector sink{std::vector<double>(acc.begin(), acc.end()), model.params.layout};
  backprop(model, acts, std::move(delta), Accumulate::squared, sink);
  std::copy(sink.values.begin(), sink.values.end(), acc.begin());
}

ParameterVector per_sample_sq_grad(const Model& model, std::span<const double> feature,
                                   std::uint32_t label) {
  Matrix x(1, feature.size());
  std::copy(feature.begin(), feature.end(), x.values.begin());
  const std::uint32_t y[1] = {label};
  check_labels(y, model.spec.num_classes());
  const auto acts = forward_all(model, x);
  Matrix delta;
  output_delta(acts.back(), y, 1.0, delta);
  ParameterVector out = zeros_like(model);
  backprop(model, acts, std::move(delta), Accumulate::squared, out);
  if (!out.all_finite()) throw NumericError("non-finite gradient");
  return out;
}

std::vector<double> per_sample_nll(const Model& model, const Dataset& data) {
  if (data.empty()) throw ConfigError("per-sample loss of an empty dataset");
  check_labels(data.labels, model.spec.num_classes());
  const Matrix logits = forward(model, data.features);
  std::vector<double> out(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto z = logits.row(n);
    out[n] = log_sum_exp(z) - z[data.labels[n]];
  }
  return out;
}

std::vector<std::uint32_t> predict(const Model& model, const Matrix& inputs) {
  const Matrix logits = forward(model, inputs);
  std::vector<std::uint32_t> out(logits.rows);
  for (std::size_t n = 0; n < logits.rows; ++n) {
    const auto z = logits.row(n);
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.size(); ++k) {
      if (z[k] > z[best]) best = k;
    }
    out[n] = static_cast<std::uint32_t>(best);
  }
  return out;
}

double accuracy(const Model& model, const Dataset& data) {
  if (data.empty()) throw ConfigError("accuracy of an empty dataset is undefined");
  const auto pred = predict(model, data.features);
  std::size_t correct = 0;
  for (std::size_t n = 0; n < pred.size(); ++n) correct += pred[n] == data.labels[n];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace unlearn
