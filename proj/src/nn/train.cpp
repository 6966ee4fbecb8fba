// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include "unlearn/error.hpp"
#include "unlearn/model.hpp"
#include "unlearn/rng.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and non-negative");
  }
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must lie in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must lie in (0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
}

Model train(Model model, const Dataset& data, const TrainConfig& cfg, PassMeter* meter,
            TrainTrace* trace) {
  cfg.validate();
  if (data.empty()) throw ConfigError("cannot train on an empty dataset");

  const std::size_t n = data.size();
  const std::size_t p = model.params.values.size();
  std::vector<double> m(p, 0.0);
  std::vector<double> v(p, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.shuffle_seed);
  const simd::KernelTable& k = simd::active();

  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      const std::span<const std::size_t> batch(order.data() + start, len);
      const LossGrad lg = loss_and_grad(model, data, batch);
      epoch_loss += lg.mean_nll * static_cast<double>(len);

      ++step;
      const double t = static_cast<double>(step);
      const simd::AdamCoefficients c{cfg.learning_rate,
                                     cfg.adam_beta1,
                                     cfg.adam_beta2,
                                     cfg.adam_eps,
                                     1.0 - std::pow(cfg.adam_beta1, t),
                                     1.0 - std::pow(cfg.adam_beta2, t)};
      k.adam_update(model.params.values.data(), lg.grad.values.data(), m.data(), v.data(), p, c);
    }
    if (meter != nullptr) meter->record(data.role);
    if (trace != nullptr) trace->epoch_mean_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  if (!model.params.all_finite()) throw NumericError("training diverged to non-finite parameters");
  return model;
}

}  // namespace unlearn
