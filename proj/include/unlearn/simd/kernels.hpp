// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Inner-loop kernels shared by the dense layers, the Fisher diagonal, the
// optimizer and the dampening step.
//
// Every kernel has a scalar reference implementation. SIMD variants are
// compiled per architecture and chosen once at startup (or by
// UNLEARN_SIMD=scalar|avx2|neon). Elementwise kernels are bit-identical to
// the scalar reference on every backend; dot and axpy may fuse
// multiply-adds and reassociate, so they agree to rounding only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace unlearn::simd {

enum class Backend : std::uint8_t { scalar, avx2, neon };

const char* backend_name(Backend backend) noexcept;

struct AdamCoefficients {
  double learning_rate;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct DampenCounts {
  std::size_t selected = 0;
  std::size_t clamped = 0;  // selected with lambda * full / forget >= 1
  std::size_t zeroed = 0;   // selected with beta < kZeroedBeta
};

inline constexpr double kZeroedBeta = 1e-12;

struct KernelTable {
  Backend backend;

  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // acc += x * x
  void (*add_squares)(const double* x, double* acc, std::size_t n);

  void (*adam_update)(double* params, const double* grad, double* m, double* v,
                      std::size_t n, const AdamCoefficients& c);

  // out_i = min(lambda * full_i / forget_i, 1) * theta_i where
  // forget_i > alpha * full_i, else theta_i.
  DampenCounts (*dampen)(const double* theta, const double* full,
                         const double* forget, double alpha, double lambda,
                         double* out, std::size_t n);

  // out_i = 0 where forget_i > alpha * full_i, else theta_i. Returns the
  // number of zeroed coordinates.
  std::size_t (*prune_selected)(const double* theta, const double* full,
                                const double* forget, double alpha,
                                double* out, std::size_t n);

  // out_i = 0 where forget_i > 0, else theta_i.
  std::size_t (*prune_positive)(const double* theta, const double* forget,
                                double* out, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* kernels_for(Backend backend) noexcept;

std::vector<Backend> available_backends();

/// Kernels used by the library. Chosen on first call.
const KernelTable& active() noexcept;

/// Throws ConfigError when the backend is unavailable.
void set_active_backend(Backend backend);

// Span conveniences over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void add_squares(std::span<const double> x, std::span<double> acc) {
  active().add_squares(x.data(), acc.data(), x.size());
}

}  // namespace unlearn::simd
