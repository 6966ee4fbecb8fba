// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Selective Synaptic Dampening and its two pruning ablations.
//
// A parameter i is selected when its forget-set importance exceeds alpha
// times its full-data importance: F_f[i] > alpha * F[i] (strict). Selected
// parameters are scaled by beta = min(lambda * F[i] / F_f[i], 1); every other
// parameter is copied bit for bit. Since beta <= 1, dampening never grows a
// parameter, so repeated requests can only shrink the model further.

#include <cstddef>
#include <vector>

#include "unlearn/fim.hpp"
#include "unlearn/model.hpp"

namespace unlearn {

struct SsdParams {
  double alpha = 10.0;   // selection threshold
  double lambda = 1.0;   // dampening constant

  void validate() const;
};

struct LayerSelection {
  std::size_t layer = 0;
  std::size_t selected = 0;
  std::size_t total = 0;
};

struct DampeningReport {
  std::size_t selected_count = 0;
  std::size_t total_params = 0;
  double selected_fraction = 0.0;
  std::size_t zeroed_count = 0;   // beta < 1e-12
  std::size_t clamped_count = 0;  // beta held at 1
  std::vector<LayerSelection> per_layer;
};

struct DampeningResult {
  ParameterVector theta;
  DampeningReport report;
};

DampeningResult ssd_dampen(const ParameterVector& theta, const FimDiagonal& fim_full,
                           const FimDiagonal& fim_forget, const SsdParams& params);

/// Zeroes every parameter with any forget-set importance. The report counts
/// zeroed parameters as selected.
DampeningResult naive_prune(const ParameterVector& theta, const FimDiagonal& fim_forget);

/// Zeroes parameters passing the SSD selection test.
DampeningResult select_prune(const ParameterVector& theta, const FimDiagonal& fim_full,
                             const FimDiagonal& fim_forget, double alpha);

inline double selected_fraction(const DampeningReport& report) noexcept { return report.selected_fraction; }

}  // namespace unlearn
