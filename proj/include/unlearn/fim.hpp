// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Diagonal of the empirical Fisher information: the mean over a dataset of
// squared log-likelihood gradients at the observed labels. Computed once for
// the full training set, it can be stored and the training data discarded.
//
// FIM file layout (little-endian):
//   "SSDF" | u32 version=1 | u64 model fingerprint | u8 granularity
//   | u64 n_samples | u64 length | length x f64

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/model.hpp"
#include "unlearn/pass_meter.hpp"

namespace unlearn {

enum class FimGranularity : std::uint8_t {
  per_sample = 0,  // mean of g_n ⊙ g_n over samples
  per_batch = 1,   // mean of G_b ⊙ G_b over batch-mean gradients
};

const char* to_string(FimGranularity g) noexcept;
FimGranularity parse_granularity(std::string_view text);

struct FimDiagonal {
  std::vector<double> values;  // same layout as the model's ParameterVector
  std::uint64_t n_samples = 0;
  FimGranularity granularity = FimGranularity::per_sample;
  std::uint64_t model_fingerprint = 0;

  /// Throws NumericError for negative or non-finite values, ConfigError for
  /// n_samples == 0.
  void validate() const;
};

inline constexpr std::uint32_t kFimVersion = 1;

/// Stable 64-bit FNV-1a hash of the model's checkpoint encoding.
std::uint64_t fingerprint(const Model& model);

/// batch_size only shapes per_batch granularity (dataset order, last batch
/// kept short); per_sample processes rows in chunks of batch_size for memory
/// but its value does not depend on it beyond summation order.
FimDiagonal fim_diagonal(const Model& model, const Dataset& data, FimGranularity granularity,
                         std::size_t batch_size = 64, PassMeter* meter = nullptr);

std::vector<std::uint8_t> encode_fim(const FimDiagonal& fim);
FimDiagonal decode_fim(std::span<const std::uint8_t> bytes);

void save_fim(const FimDiagonal& fim, const std::filesystem::path& path);
FimDiagonal load_fim(const std::filesystem::path& path);

struct LoadedFim {
  FimDiagonal fim;
  std::optional<std::string> warning;  // set when fingerprints disagree
};

/// Loads and compares the stored fingerprint against `expected`. A mismatch
/// is reported, not thrown.
LoadedFim load_fim_checked(const std::filesystem::path& path, std::uint64_t expected);

}  // namespace unlearn
