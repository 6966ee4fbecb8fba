// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "unlearn/dataset.hpp"

namespace unlearn {

/// Complete sweeps over D, D_f and D_r performed by an unlearning method.
struct PassCounts {
  std::uint64_t full = 0;
  std::uint64_t forget = 0;
  std::uint64_t retain = 0;

  friend bool operator==(const PassCounts&, const PassCounts&) = default;
};

/// Counts dataset passes at the point where data is swept (training epochs,
/// Fisher accumulation). Test and derived datasets are not counted.
class PassMeter {
 public:
  void record(DataRole role, std::uint64_t passes = 1) noexcept {
    switch (role) {
      case DataRole::full: counts_.full += passes; break;
      case DataRole::forget: counts_.forget += passes; break;
      case DataRole::retain: counts_.retain += passes; break;
      case DataRole::test:
      case DataRole::derived: break;
    }
  }

  [[nodiscard]] const PassCounts& counts() const noexcept { return counts_; }

 private:
  PassCounts counts_;
};

}  // namespace unlearn
