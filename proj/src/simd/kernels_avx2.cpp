// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2/FMA variants, 4 doubles per register. Built with -mavx2 -mfma and
// only reached after a cpuid check in dispatch.cpp.

#include <immintrin.h>

#include <bit>

#include "simd/tables.hpp"

namespace unlearn::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline std::size_t lanes_set(__m256d mask) {
  return static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(mask))));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_squares(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(vx, vx)));
  }
  kScalarTable.add_squares(x + i, acc + i, n - i);
}

void adam_update(double* params, const double* grad, double* m, double* v,
                 std::size_t n, const AdamCoefficients& c) {
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
  const __m256d lr = _mm256_set1_pd(c.learning_rate);
  const __m256d eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d vm = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(omb1, g));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d m_hat = _mm256_div_pd(vm, bc1);
    const __m256d v_hat = _mm256_div_pd(vv, bc2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(params + i, _mm256_sub_pd(_mm256_loadu_pd(params + i), step));
  }
  kScalarTable.adam_update(params + i, grad + i, m + i, v + i, n - i, c);
}

DampenCounts dampen(const double* theta, const double* full, const double* forget,
                    double alpha, double lambda, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vl = _mm256_set1_pd(lambda);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d tiny = _mm256_set1_pd(kZeroedBeta);
  DampenCounts counts;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_loadu_pd(theta + i);
    const __m256d f = _mm256_loadu_pd(full + i);
    const __m256d ff = _mm256_loadu_pd(forget + i);
    const __m256d sel = _mm256_cmp_pd(ff, _mm256_mul_pd(va, f), _CMP_GT_OQ);
    // Unselected lanes may hold 0/0 here; the blend discards them.
    const __m256d raw = _mm256_div_pd(_mm256_mul_pd(vl, f), ff);
    const __m256d beta = _mm256_min_pd(raw, one);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(t, _mm256_mul_pd(beta, t), sel));
    counts.selected += lanes_set(sel);
    counts.clamped += lanes_set(_mm256_and_pd(sel, _mm256_cmp_pd(raw, one, _CMP_GE_OQ)));
    counts.zeroed += lanes_set(_mm256_and_pd(sel, _mm256_cmp_pd(beta, tiny, _CMP_LT_OQ)));
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
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t zeroed = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sel = _mm256_cmp_pd(_mm256_loadu_pd(forget + i),
                                      _mm256_mul_pd(va, _mm256_loadu_pd(full + i)), _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_andnot_pd(sel, _mm256_loadu_pd(theta + i)));
    zeroed += lanes_set(sel);
  }
  return zeroed + kScalarTable.prune_selected(theta + i, full + i, forget + i, alpha, out + i, n - i);
}

std::size_t prune_positive(const double* theta, const double* forget, double* out,
                           std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t zeroed = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d sel = _mm256_cmp_pd(_mm256_loadu_pd(forget + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_andnot_pd(sel, _mm256_loadu_pd(theta + i)));
    zeroed += lanes_set(sel);
  }
  return zeroed + kScalarTable.prune_positive(theta + i, forget + i, out + i, n - i);
}

}  // namespace

const KernelTable kAvx2Table{
    Backend::avx2, &dot,    &axpy,           &add_squares,
    &adam_update,  &dampen, &prune_selected, &prune_positive,
};

}  // namespace unlearn::simd
