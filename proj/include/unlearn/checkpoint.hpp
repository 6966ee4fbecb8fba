// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Checkpoint layout (little-endian):
//   "SSDC" | u32 version=1 | u32 L | L x u32 layer dim | u8 activation
//   | u64 parameter count | parameter count x f64
// The init seed is not stored; loaded models carry seed 0.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "unlearn/model.hpp"

namespace unlearn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Model& model);
Model decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace unlearn
