// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Retrain-based reference methods: the gold model retrained on D_r only,
// finetuning on D_r, and amnesiac relabeling of D_f.

#include <cstdint>
#include <string_view>

#include "unlearn/dataset.hpp"
#include "unlearn/model.hpp"
#include "unlearn/pass_meter.hpp"

namespace unlearn {

enum class BaselineMethod : std::uint8_t { retrain, finetune, amnesiac };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::retrain;
  TrainConfig train_cfg;
  std::size_t finetune_epochs = 5;
  std::size_t amnesiac_epochs = 2;
  std::uint64_t relabel_seed = 0;

  void validate() const;
};

/// Fresh init from spec.seed, trained on the retain set only. Takes the
/// retain set alone so D_f cannot leak in.
Model retrain_gold(const Dataset& retain, const ModelSpec& spec, const TrainConfig& cfg,
                   PassMeter* meter = nullptr);

/// Continues training on D_r for cfg.finetune_epochs with fresh Adam state.
Model finetune(Model model, const ForgetSplit& split, const BaselineConfig& cfg, PassMeter* meter = nullptr,
               TrainTrace* trace = nullptr);

/// D_f with each label replaced by a uniformly drawn incorrect class.
Dataset relabel_incorrect(const Dataset& forget, std::uint64_t seed);

/// Trains cfg.amnesiac_epochs on relabeled D_f pooled with D_r.
Model amnesiac(Model model, const ForgetSplit& split, const BaselineConfig& cfg, PassMeter* meter = nullptr);

}  // namespace unlearn
