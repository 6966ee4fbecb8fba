// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "simd/tables.hpp"

namespace unlearn::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_squares(const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * x[i];
}

void adam_update(double* params, const double* grad, double* m, double* v,
                 std::size_t n, const AdamCoefficients& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    params[i] = params[i] - c.learning_rate * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

DampenCounts dampen(const double* theta, const double* full, const double* forget,
                    double alpha, double lambda, double* out, std::size_t n) {
  DampenCounts counts;
  for (std::size_t i = 0; i < n; ++i) {
    if (forget[i] > alpha * full[i]) {
      const double raw = (lambda * full[i]) / forget[i];
      const double beta = std::min(raw, 1.0);
      out[i] = beta * theta[i];
      ++counts.selected;
      if (raw >= 1.0) ++counts.clamped;
      if (beta < kZeroedBeta) ++counts.zeroed;
    } else {
      out[i] = theta[i];
    }
  }
  return counts;
}

std::size_t prune_selected(const double* theta, const double* full,
                           const double* forget, double alpha, double* out,
                           std::size_t n) {
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool hit = forget[i] > alpha * full[i];
    out[i] = hit ? 0.0 : theta[i];
    zeroed += hit;
  }
  return zeroed;
}

std::size_t prune_positive(const double* theta, const double* forget, double* out,
                           std::size_t n) {
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool hit = forget[i] > 0.0;
    out[i] = hit ? 0.0 : theta[i];
    zeroed += hit;
  }
  return zeroed;
}

}  // namespace

const KernelTable kScalarTable{
    Backend::scalar, &dot,     &axpy,           &add_squares,
    &adam_update,    &dampen,  &prune_selected, &prune_positive,
};

}  // namespace unlearn::simd
