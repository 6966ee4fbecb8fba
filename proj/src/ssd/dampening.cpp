// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/dampening.hpp"

#include <cmath>
#include <string>

#include "unlearn/error.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn {

void SsdParams::validate() const {
  if (!(alpha > 0.0) || std::isnan(alpha)) throw ConfigError("alpha must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive and finite");
}

namespace {

void check_fim(const ParameterVector& theta, const FimDiagonal& fim, const char* which) {
  if (fim.values.size() != theta.values.size()) {
    throw ShapeError(std::string(which) + " FIM has " + std::to_string(fim.values.size()) +
                     " entries, parameters have " + std::to_string(theta.values.size()));
  }
  for (double v : fim.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw NumericError(std::string(which) + " FIM has a negative or non-finite entry");
    }
  }
}

DampeningResult make_result(const ParameterVector& theta) {
  DampeningResult r;
  r.theta.layout = theta.layout;
  r.theta.values.resize(theta.values.size());
  r.report.total_params = theta.values.size();
  return r;
}

// Runs `kernel(offset, length) -> selected count` once per layout segment so
// selections can be attributed to layers.
template <typename Kernel>
void per_segment(const ParameterVector& theta, DampeningReport& report, Kernel kernel) {
  for (const Segment& seg : theta.layout) {
    const std::size_t selected = kernel(seg.offset, seg.length);
    if (report.per_layer.empty() || report.per_layer.back().layer != seg.layer) {
      report.per_layer.push_back({seg.layer, 0, 0});
    }
    report.per_layer.back().selected += selected;
    report.per_layer.back().total += seg.length;
    report.selected_count += selected;
  }
  if (theta.layout.empty() && !theta.values.empty()) {
    report.selected_count += kernel(0, theta.values.size());
  }
  report.selected_fraction =
      report.total_params == 0 ? 0.0
                               : static_cast<double>(report.selected_count) / static_cast<double>(report.total_params);
}

}  // namespace

DampeningResult ssd_dampen(const ParameterVector& theta, const FimDiagonal& fim_full,
                           const FimDiagonal& fim_forget, const SsdParams& params) {
  params.validate();
  check_fim(theta, fim_full, "full");
  check_fim(theta, fim_forget, "forget");
  DampeningResult r = make_result(theta);
  const simd::KernelTable& k = simd::active();
  per_segment(theta, r.report, [&](std::size_t off, std::size_t len) {
    const simd::DampenCounts c = k.dampen(theta.values.data() + off, fim_full.values.data() + off,
                                          fim_forget.values.data() + off, params.alpha, params.lambda,
                                          r.theta.values.data() + off, len);
    r.report.clamped_count += c.clamped;
    r.report.zeroed_count += c.zeroed;
    return c.selected;
  });
  return r;
}

DampeningResult naive_prune(const ParameterVector& theta, const FimDiagonal& fim_forget) {
  check_fim(theta, fim_forget, "forget");
  DampeningResult r = make_result(theta);
  const simd::KernelTable& k = simd::active();
  per_segment(theta, r.report, [&](std::size_t off, std::size_t len) {
    return k.prune_positive(theta.values.data() + off, fim_forget.values.data() + off, r.theta.values.data() + off,
                            len);
  });
  r.report.zeroed_count = r.report.selected_count;
  return r;
}

DampeningResult select_prune(const ParameterVector& theta, const FimDiagonal& fim_full,
                             const FimDiagonal& fim_forget, double alpha) {
  if (!(alpha > 0.0) || std::isnan(alpha)) throw ConfigError("alpha must be positive");
  check_fim(theta, fim_full, "full");
  check_fim(theta, fim_forget, "forget");
  DampeningResult r = make_result(theta);
  const simd::KernelTable& k = simd::active();
  per_segment(theta, r.report, [&](std::size_t off, std::size_t len) {
    return k.prune_selected(theta.values.data() + off, fim_full.values.data() + off, fim_forget.values.data() + off,
                            alpha, r.theta.values.data() + off, len);
  });
  r.report.zeroed_count = r.report.selected_count;
  return r;
}

}  // namespace unlearn
