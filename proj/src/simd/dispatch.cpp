// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "simd/tables.hpp"
#include "unlearn/error.hpp"

namespace unlearn::simd {
namespace {

#if defined(UNLEARN_HAVE_AVX2)
bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* best_available() noexcept {
#if defined(UNLEARN_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2Table;
#endif
#if defined(UNLEARN_HAVE_NEON)
  return &kNeonTable;
#endif
  return &kScalarTable;
}

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("UNLEARN_SIMD");
  if (env != nullptr) {
    const std::string_view want(env);
    if (want == "scalar") return &kScalarTable;
    if (want == "avx2") {
      if (const KernelTable* t = kernels_for(Backend::avx2)) return t;
    } else if (want == "neon") {
      if (const KernelTable* t = kernels_for(Backend::neon)) return t;
    }
  }
  return best_available();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const char* backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return kScalarTable; }

const KernelTable* kernels_for(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return &kScalarTable;
    case Backend::avx2:
#if defined(UNLEARN_HAVE_AVX2)
      if (cpu_has_avx2()) return &kAvx2Table;
#endif
      return nullptr;
    case Backend::neon:
#if defined(UNLEARN_HAVE_NEON)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (kernels_for(b) != nullptr) out.push_back(b);
  }
  return out;
}

const KernelTable& active() noexcept {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    const KernelTable* chosen = initial_table();
    if (g_active.compare_exchange_strong(table, chosen, std::memory_order_acq_rel)) {
      table = chosen;
    }
  }
  return *table;
}

void set_active_backend(Backend backend) {
  const KernelTable* table = kernels_for(backend);
  if (table == nullptr) {
    throw ConfigError(std::string("SIMD backend not available: ") + backend_name(backend));
  }
  g_active.store(table, std::memory_order_release);
}

}  // namespace unlearn::simd
