// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/matrix.hpp"

namespace unlearn {

enum class SplitTag : std::uint8_t { train, test };

// Which part of the unlearning problem a dataset plays. PassMeter uses it
// to attribute a sweep over the data to D, D_r or D_f.
enum class DataRole : std::uint8_t { full, retain, forget, test, derived };

struct Dataset {
  Matrix features;
  std::vector<std::uint32_t> labels;
  std::optional<std::vector<std::uint32_t>> subclass_labels;
  std::size_t num_classes = 0;     // K
  std::size_t num_subclasses = 0;  // S, 0 when there are no subclass labels
  SplitTag split = SplitTag::train;
  DataRole role = DataRole::full;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return features.cols; }
  [[nodiscard]] bool empty() const noexcept { return labels.empty(); }

  /// Throws ShapeError/ConfigError when the invariants do not hold.
  void validate() const;

  /// Rows at `indices`, in the given order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices, DataRole new_role) const;

  /// Rows for which `keep(label, subclass_label)` holds, order preserved.
  template <typename Pred>
  [[nodiscard]] Dataset filter(Pred keep, DataRole new_role) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size(); ++i) {
      const std::uint32_t sub = subclass_labels ? (*subclass_labels)[i] : 0u;
      if (keep(labels[i], sub)) idx.push_back(i);
    }
    return subset(idx, new_role);
  }
};

/// Rows of `a` followed by rows of `b`. Both must agree on dim and K.
Dataset concat(const Dataset& a, const Dataset& b, DataRole role);

// ---------------------------------------------------------------------------
// Synthetic superclass/subclass benchmark

struct SyntheticSpec {
  std::size_t superclasses = 5;
  std::size_t subclasses_per_super = 4;
  std::size_t samples_per_subclass = 50;
  std::size_t dim = 16;
  double cluster_spread = 1.0;
  double super_separation = 10.0;
  double sub_separation = 3.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Gaussian clusters nested two levels deep. Labels are superclass indices;
/// subclass_labels index the subclass within its superclass. Each subclass
/// contributes samples_per_subclass / 5 test rows and the rest train rows.
TrainTestSplit gen_synthetic(const SyntheticSpec& spec);

// ---------------------------------------------------------------------------
// IDX (MNIST) ingestion

/// Pixels scaled by 1/255, row-major. K is max label + 1.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

// ---------------------------------------------------------------------------
// Forget splits

struct ForgetSpec {
  enum class Kind : std::uint8_t { full_class, subclass, random_n };

  Kind kind = Kind::full_class;
  std::uint32_t cls = 0;        // full_class, subclass (superclass k)
  std::uint32_t sub = 0;        // subclass s
  std::size_t count = 0;        // random_n
  std::uint64_t seed = 0;       // random_n

  static ForgetSpec full_class(std::uint32_t k) { return {Kind::full_class, k, 0, 0, 0}; }
  static ForgetSpec subclass(std::uint32_t k, std::uint32_t s) { return {Kind::subclass, k, s, 0, 0}; }
  static ForgetSpec random_n(std::size_t n, std::uint64_t seed) {
    return {Kind::random_n, 0, 0, n, seed};
  }

  friend bool operator==(const ForgetSpec&, const ForgetSpec&) = default;
};

/// Accepts "class:K", "subclass:K:S" and "random:N:SEED".
ForgetSpec parse_forget_spec(std::string_view text);
std::string to_string(const ForgetSpec& spec);

struct ForgetSplit {
  Dataset retain;  // D_r
  Dataset forget;  // D_f
  std::vector<std::size_t> retain_indices;
  std::vector<std::size_t> forget_indices;
  ForgetSpec spec;
};

/// Both parts keep the original row order.
ForgetSplit split_forget(const Dataset& data, const ForgetSpec& spec);

/// True when test row (label, subclass) belongs to what `spec` forgets.
/// random_n forgets individual training rows, so no test row matches.
bool forgets_test_row(const ForgetSpec& spec, std::uint32_t label, std::uint32_t sub);

}  // namespace unlearn
