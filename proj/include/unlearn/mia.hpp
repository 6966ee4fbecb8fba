// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Loss-based membership inference. A one-feature logistic regression is fit
// to separate per-sample losses of known members (a subsample of D_r) from
// non-members (the test set); the MIA score is the percentage of D_f it
// labels as members.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/model.hpp"

namespace unlearn {

struct AttackModel {
  double weight = 0.0;
  double bias = 0.0;

  /// P(member | loss).
  [[nodiscard]] double member_probability(double loss) const noexcept;
  /// Member iff probability > 0.5.
  [[nodiscard]] bool is_member(double loss) const noexcept;
};

struct AttackFit {
  AttackModel model;
  double train_accuracy = 0.0;  // on the balanced member/non-member pools
  std::size_t members = 0;      // pool sizes after balancing
  std::size_t nonmembers = 0;
};

struct AttackOptions {
  std::size_t iters = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;  // balancing subsample
};

/// Full-batch gradient descent from zero on the standardized loss; the
/// result is mapped back to raw-loss coordinates. The larger pool is
/// subsampled to the size of the smaller one.
AttackFit fit_attacker(std::span<const double> member_losses, std::span<const double> nonmember_losses,
                       const AttackOptions& opts = {});

/// Per-sample softmax cross-entropy at the true label.
std::vector<double> loss_features(const Model& model, const Dataset& data);

struct MiaResult {
  double score_percent = 0.0;
  double attacker_train_accuracy = 0.0;
  std::size_t members = 0;
  std::size_t nonmembers = 0;
};

/// Members: seed-chosen subsample of D_r of size min(|test|, |D_r|).
/// Non-members: the test set. Scored on `target` (normally D_f).
MiaResult mia_score(const Model& model, const Dataset& retain, const Dataset& test, const Dataset& target,
                    std::uint64_t seed);

inline MiaResult mia_score(const Model& model, const ForgetSplit& split, const Dataset& test, std::uint64_t seed) {
  return mia_score(model, split.retain, test, split.forget, seed);
}

}  // namespace unlearn
