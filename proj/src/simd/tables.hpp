// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "unlearn/simd/kernels.hpp"

namespace unlearn::simd {

extern const KernelTable kScalarTable;
#if defined(UNLEARN_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(UNLEARN_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace unlearn::simd
