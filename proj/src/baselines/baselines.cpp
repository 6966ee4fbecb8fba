// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/baselines.hpp"

#include "unlearn/error.hpp"
#include "unlearn/rng.hpp"

namespace unlearn {

void BaselineConfig::validate() const {
  train_cfg.validate();
  if (finetune_epochs == 0) throw ConfigError("finetune_epochs must be >= 1");
  if (amnesiac_epochs == 0) throw ConfigError("amnesiac_epochs must be >= 1");
}

Model retrain_gold(const Dataset& retain, const ModelSpec& spec, const TrainConfig& cfg, PassMeter* meter) {
  if (retain.empty()) throw ConfigError("retrain: retain set is empty");
  return train(init_model(spec), retain, cfg, meter);
}

Model finetune(Model model, const ForgetSplit& split, const BaselineConfig& cfg, PassMeter* meter,
               TrainTrace* trace) {
  cfg.validate();
  if (split.retain.empty()) throw ConfigError("finetune: retain set is empty");
  TrainConfig tc = cfg.train_cfg;
  tc.epochs = cfg.finetune_epochs;
  return train(std::move(model), split.retain, tc, meter, trace);
}

Dataset relabel_incorrect(const Dataset& forget, std::uint64_t seed) {
  if (forget.num_classes < 2) throw ConfigError("amnesiac relabeling needs at least 2 classes");
  Dataset out = forget;
  out.role = DataRole::derived;
  Rng rng(seed);
  const std::uint64_t wrong_choices = forget.num_classes - 1;
  for (std::uint32_t& y : out.labels) {
    // Draw from the K-1 other classes by skipping over the true label.
    auto pick = static_cast<std::uint32_t>(rng.below(wrong_choices));
    if (pick >= y) ++pick;
    y = pick;
  }
  return out;
}

Model amnesiac(Model model, const ForgetSplit& split, const BaselineConfig& cfg, PassMeter* meter) {
  cfg.validate();
  if (split.forget.empty()) throw ConfigError("amnesiac: forget set is empty");
  const Dataset pool = concat(relabel_incorrect(split.forget, cfg.relabel_seed), split.retain, DataRole::derived);
  TrainConfig tc = cfg.train_cfg;
  tc.epochs = cfg.amnesiac_epochs;
  Model out = train(std::move(model), pool, tc);
  // Every epoch over the pooled set sweeps both D_r and D_f once.
  if (meter != nullptr) {
    meter->record(DataRole::retain, cfg.amnesiac_epochs);
    meter->record(DataRole::forget, cfg.amnesiac_epochs);
  }
  return out;
}

}  // namespace unlearn
