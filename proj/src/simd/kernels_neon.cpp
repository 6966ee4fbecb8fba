// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

// AArch64 NEON variants, 2 doubles per register. NEON is part of the
// AArch64 baseline so no runtime check is needed.

#include <arm_neon.h>

#include "simd/tables.hpp"

namespace unlearn::simd {
namespace {

inline std::size_t lanes_set(uint64x2_t mask) {
  return static_cast<std::size_t>((vgetq_lane_u64(mask, 0) & 1u) + (vgetq_lane_u64(mask, 1) & 1u));
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_squares(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vx = vld1q_f64(x + i);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vx, vx)));
  }
  kScalarTable.add_squares(x + i, acc + i, n - i);
}

void adam_update(double* params, const double* grad, double* m, double* v,
                 std::size_t n, const AdamCoefficients& c) {
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t omb1 = vdupq_n_f64(1.0 - c.beta1);
  const float64x2_t omb2 = vdupq_n_f64(1.0 - c.beta2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.learning_rate);
  const float64x2_t eps = vdupq_n_f64(c.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t vm = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, g));
    const float64x2_t vv = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(g, g)));
    vst1q_f64(m + i, vm);
    vst1q_f64(v + i, vv);
    const float64x2_t m_hat = vdivq_f64(vm, bc1);
    const float64x2_t v_hat = vdivq_f64(vv, bc2);
    const float64x2_t step = vdivq_f64(vmulq_f64(lr, m_hat), vaddq_f64(vsqrtq_f64(v_hat), eps));
    vst1q_f64(params + i, vsubq_f64(vld1q_f64(params + i), step));
  }
  kScalarTable.adam_update(params + i, grad + i, m + i, v + i, n - i, c);
}

DampenCounts dampen(const double* theta, const double* full, const double* forget,
                    double alpha, double lambda, double* out, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t vl = vdupq_n_f64(lambda);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t tiny = vdupq_n_f64(kZeroedBeta);
  DampenCounts counts;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vld1q_f64(theta + i);
    const float64x2_t f = vld1q_f64(full + i);
    const float64x2_t ff = vld1q_f64(forget + i);
    const uint64x2_t sel = vcgtq_f64(ff, vmulq_f64(va, f));
    const float64x2_t raw = vdivq_f64(vmulq_f64(vl, f), ff);
    // vminq_f64 propagates NaN; only unselected lanes can be NaN.
    const float64x2_t beta = vbslq_f64(vcltq_f64(raw, one), raw, one);
    vst1q_f64(out + i, vbslq_f64(sel, vmulq_f64(beta, t), t));
    counts.selected += lanes_set(sel);
    counts.clamped += lanes_set(vandq_u64(sel, vcgeq_f64(raw, one)));
    counts.zeroed += lanes_set(vandq_u64(sel, vcltq_f64(beta, tiny)));
  }
  const DampenCounts tail =
      kScalarTable.dampen(theta + i, full + i, forget + i, alpha, lambda, out + i, n - i);
  counts.selected += tail.selected;
  counts.clamped += tail.clamped;
  counts.zeroed += tail.zeroed;
  return counts;
}

std::size_t prune_selected(const double* theta, const double* full,
                           const double* forget, double alpha, double* out,
                           std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t zeroed = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t sel = vcgtq_f64(vld1q_f64(forget + i), vmulq_f64(va, vld1q_f64(full + i)));
    vst1q_f64(out + i, vbslq_f64(sel, zero, vld1q_f64(theta + i)));
    zeroed += lanes_set(sel);
  }
  return zeroed + kScalarTable.prune_selected(theta + i, full + i, forget + i, alpha, out + i, n - i);
}

std::size_t prune_positive(const double* theta, const double* forget, double* out,
                           std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t zeroed = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t sel = vcgtq_f64(vld1q_f64(forget + i), zero);
    vst1q_f64(out + i, vbslq_f64(sel, zero, vld1q_f64(theta + i)));
    zeroed += lanes_set(sel);
  }
  return zeroed + kScalarTable.prune_positive(theta + i, forget + i, out + i, n - i);
}

}  // namespace

const KernelTable kNeonTable{
    Backend::neon, &dot,    &axpy,           &add_squares,
    &adam_update,  &dampen, &prune_selected, &prune_positive,
};

}  // namespace unlearn::simd
