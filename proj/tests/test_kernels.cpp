// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "unlearn/error.hpp"
#include "unlearn/rng.hpp"
#include "unlearn/simd/kernels.hpp"

using namespace unlearn;
using simd::Backend;

namespace {

std::vector<double> randoms(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

// Lengths that hit empty input, pure tails and mixed vector/tail paths.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1001};

}  // namespace

TEST_CASE("scalar backend is always available and listed first") {
  const auto backends = simd::available_backends();
  REQUIRE(!backends.empty());
  CHECK(backends.front() == Backend::scalar);
  CHECK(simd::kernels_for(Backend::scalar) == &simd::scalar_kernels());
  CHECK(std::string(simd::backend_name(Backend::avx2)) == "avx2");
}

TEST_CASE("every available backend matches the scalar reference") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  Rng rng(2024);
  for (Backend b : simd::available_backends()) {
    const simd::KernelTable* k = simd::kernels_for(b);
    REQUIRE(k != nullptr);
    CAPTURE(simd::backend_name(b));
    for (std::size_t n : kLengths) {
      CAPTURE(n);
      const auto x = randoms(rng, n, -2.0, 2.0);
      const auto y0 = randoms(rng, n, -2.0, 2.0);

      // Reductions and fused updates agree to rounding.
      const double d_ref = ref.dot(x.data(), y0.data(), n);
      const double d = k->dot(x.data(), y0.data(), n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y0[i]);
      CHECK(std::abs(d - d_ref) <= 1e-14 * (mag + 1.0));

      auto y_ref = y0;
      auto y = y0;
      ref.axpy(0.37, x.data(), y_ref.data(), n);
      k->axpy(0.37, x.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(y_ref[i]).epsilon(1e-15));

      // Elementwise kernels are bit-identical.
      auto acc_ref = y0;
      auto acc = y0;
      ref.add_squares(x.data(), acc_ref.data(), n);
      k->add_squares(x.data(), acc.data(), n);
      CHECK(bitwise_equal(acc, acc_ref));

      const simd::AdamCoefficients c{1e-3, 0.9, 0.999, 1e-8, 1 - 0.9 * 0.9, 1 - 0.999 * 0.999};
      auto p_ref = y0, m_ref = randoms(rng, n, -0.1, 0.1), v_ref = randoms(rng, n, 0.0, 0.1);
      auto p = p_ref, m = m_ref, v = v_ref;
      ref.adam_update(p_ref.data(), x.data(), m_ref.data(), v_ref.data(), n, c);
      k->adam_update(p.data(), x.data(), m.data(), v.data(), n, c);
      CHECK(bitwise_equal(p, p_ref));
      CHECK(bitwise_equal(m, m_ref));
      CHECK(bitwise_equal(v, v_ref));

      // Fisher-like inputs with exact zeros, ties and a spread of ratios.
      auto full = randoms(rng, n, 0.0, 1.0);
      auto forget = randoms(rng, n, 0.0, 10.0);
      for (std::size_t i = 0; i < n; i += 5) full[i] = 0.0;
      for (std::size_t i = 1; i < n; i += 7) forget[i] = 0.0;
      for (std::size_t i = 2; i < n; i += 11) forget[i] = 3.0 * full[i];
      for (double alpha : {0.0, 1.0, 3.0, 1e12}) {
        for (double lambda : {0.1, 1.0, 5.0}) {
          std::vector<double> o_ref(n), o(n);
          const auto c_ref = ref.dampen(y0.data(), full.data(), forget.data(), alpha, lambda, o_ref.data(), n);
          const auto ck = k->dampen(y0.data(), full.data(), forget.data(), alpha, lambda, o.data(), n);
          CHECK(bitwise_equal(o, o_ref));
          CHECK(ck.selected == c_ref.selected);
          CHECK(ck.clamped == c_ref.clamped);
          CHECK(ck.zeroed == c_ref.zeroed);
        }
        std::vector<double> o_ref(n), o(n);
        CHECK(k->prune_selected(y0.data(), full.data(), forget.data(), alpha, o.data(), n) ==
              ref.prune_selected(y0.data(), full.data(), forget.data(), alpha, o_ref.data(), n));
        CHECK(bitwise_equal(o, o_ref));
      }
      std::vector<double> o_ref(n), o(n);
      CHECK(k->prune_positive(y0.data(), forget.data(), o.data(), n) ==
            ref.prune_positive(y0.data(), forget.data(), o_ref.data(), n));
      CHECK(bitwise_equal(o, o_ref));
    }
  }
}

TEST_CASE("dampen kernel hand example") {
  const double theta[] = {2.0, 2.0, -4.0, 1.0};
  const double full[] = {1.0, 1.0, 0.0, 0.0};
  const double forget[] = {20.0, 10.0, 5.0, 0.0};
  for (Backend b : simd::available_backends()) {
    double out[4];
    const auto c = simd::kernels_for(b)->dampen(theta, full, forget, 10.0, 1.0, out, 4);
    CHECK(out[0] == doctest::Approx(0.1));
    CHECK(out[1] == 2.0);   // 10 > 10 is false
    CHECK(out[2] == 0.0);   // no importance to the full data
    CHECK(std::signbit(out[2]));
    CHECK(out[3] == 1.0);   // 0 > 0 is false
    CHECK(c.selected == 2);
    CHECK(c.zeroed == 1);
    CHECK(c.clamped == 0);
  }
}

TEST_CASE("backend override") {
  const Backend before = simd::active().backend;
  simd::set_active_backend(Backend::scalar);
  CHECK(simd::active().backend == Backend::scalar);
  if (simd::kernels_for(Backend::neon) == nullptr) {
    CHECK_THROWS_AS(simd::set_active_backend(Backend::neon), ConfigError);
  }
  simd::set_active_backend(before);
}
