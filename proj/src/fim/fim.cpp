// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/fim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "io/binary.hpp"
#include "unlearn/checkpoint.hpp"
#include "unlearn/error.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn {

const char* to_string(FimGranularity g) noexcept {
  return g == FimGranularity::per_batch ? "per_batch" : "per_sample";
}

FimGranularity parse_granularity(std::string_view text) {
  if (text == "per_sample") return FimGranularity::per_sample;
  if (text == "per_batch") return FimGranularity::per_batch;
  throw ConfigError("granularity must be per_sample or per_batch, got '" + std::string(text) + "'");
}

void FimDiagonal::validate() const {
  if (n_samples == 0) throw ConfigError("FIM diagonal must average at least one sample");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("FIM diagonal has a negative or non-finite entry");
  }
}

std::uint64_t fingerprint(const Model& model) { return io::fnv1a64(encode_checkpoint(model)); }

FimDiagonal fim_diagonal(const Model& model, const Dataset& data, FimGranularity granularity,
                         std::size_t batch_size, PassMeter* meter) {
  if (data.empty()) throw ConfigError("FIM of an empty dataset");
  if (batch_size == 0) throw ConfigError("FIM batch size must be positive");
  if (!model.params.all_finite()) throw NumericError("model has non-finite parameters");

  const std::size_t n = data.size();
  FimDiagonal fim;
  fim.values.assign(model.params.values.size(), 0.0);
  fim.granularity = granularity;
  fim.model_fingerprint = fingerprint(model);

  double divisor = 0.0;
  if (granularity == FimGranularity::per_sample) {
    for (std::size_t start = 0; start < n; start += batch_size) {
      accumulate_per_sample_sq_grads(model, data, start, std::min(n, start + batch_size), fim.values);
    }
    divisor = static_cast<double>(n);
  } else {
    std::vector<std::size_t> idx(batch_size);
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t len = std::min(batch_size, n - start);
      std::iota(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(len), start);
      const LossGrad lg = loss_and_grad(model, data, std::span<const std::size_t>(idx.data(), len));
      simd::add_squares(lg.grad.values, fim.values);
      ++batches;
    }
    divisor = static_cast<double>(batches);
  }
  for (double& v : fim.values) v /= divisor;
  // n_samples counts rows in both modes; the granularity tag says how they
  // were grouped.
  fim.n_samples = n;

  for (double v : fim.values) {
    if (!std::isfinite(v)) throw NumericError("non-finite gradient while accumulating FIM");
  }
  if (meter != nullptr) meter->record(data.role);
  return fim;
}

}  // namespace unlearn
