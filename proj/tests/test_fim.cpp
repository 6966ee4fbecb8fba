// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "io/binary.hpp"
#include "support/oracles.hpp"
#include "unlearn/error.hpp"
#include "unlearn/fim.hpp"
#include "unlearn/pass_meter.hpp"

using namespace unlearn;

namespace {

void check_close(const std::vector<double>& a, const std::vector<double>& b, double rel) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
    CHECK(std::abs(a[i] - b[i]) / scale <= rel);
  }
}

FormatFault fim_fault(std::span<const std::uint8_t> bytes) {
  try {
    decode_fim(bytes);
  } catch (const FormatError& e) {
    return e.fault();
  }
  FAIL("decode succeeded");
  return FormatFault::invalid_value;
}

}  // namespace

TEST_CASE("per-sample FIM equals the one-sample loop") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Model m = oracle::random_model({5, 8, 4}, seed);
    const Dataset d = oracle::random_dataset(37, 5, 4, seed + 50);
    for (std::size_t bs : {1, 7, 64}) {
      const FimDiagonal f = fim_diagonal(m, d, FimGranularity::per_sample, bs);
      check_close(f.values, oracle::loop_fim(m, d, FimGranularity::per_sample), 1e-12);
      CHECK(f.n_samples == 37);
    }
  }
}

TEST_CASE("per-batch FIM equals the batch loop") {
  const Model m = oracle::random_model({4, 6, 3}, 3);
  const Dataset d = oracle::random_dataset(50, 4, 3, 4);
  const FimDiagonal f = fim_diagonal(m, d, FimGranularity::per_batch, 16);
  check_close(f.values, oracle::loop_fim(m, d, FimGranularity::per_batch, 16), 1e-12);
  CHECK(f.granularity == FimGranularity::per_batch);
  CHECK(f.n_samples == 50);
  // Batch-mean gradients partially cancel, so the batch estimate is smaller
  // on aggregate than the per-sample one.
  const FimDiagonal ps = fim_diagonal(m, d, FimGranularity::per_sample, 16);
  double sb = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    sb += f.values[i];
    ss += ps.values[i];
  }
  CHECK(sb < ss);
  // A single batch covering everything is the squared full gradient.
  const FimDiagonal one = fim_diagonal(m, d, FimGranularity::per_batch, 1000);
  const auto g = loss_and_grad(m, d).grad.values;
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(one.values[i] == doctest::Approx(g[i] * g[i]).epsilon(1e-12));
}

TEST_CASE("FIM is linear in concatenation and permutation invariant") {
  const Model m = oracle::random_model({3, 7, 3}, 8);
  const Dataset a = oracle::random_dataset(13, 3, 3, 1);
  const Dataset b = oracle::random_dataset(29, 3, 3, 2);
  const auto fa = fim_diagonal(m, a, FimGranularity::per_sample).values;
  const auto fb = fim_diagonal(m, b, FimGranularity::per_sample).values;
  const auto fab = fim_diagonal(m, concat(a, b, DataRole::derived), FimGranularity::per_sample).values;
  std::vector<double> mix(fa.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = (13.0 * fa[i] + 29.0 * fb[i]) / 42.0;
  check_close(fab, mix, 1e-12);

  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(3);
  rng.shuffle(std::span<std::size_t>(perm));
  check_close(fim_diagonal(m, b.subset(perm, DataRole::derived), FimGranularity::per_sample).values, fb, 1e-12);
}

TEST_CASE("FIM of identical samples is that sample's squared gradient") {
  const Model m = oracle::random_model({3, 5, 2}, 4);
  const Dataset one = oracle::random_dataset(1, 3, 2, 5);
  std::vector<std::size_t> idx(12, 0);
  const Dataset many = one.subset(idx, DataRole::derived);
  const auto sq = per_sample_sq_grad(m, one.features.row(0), one.labels[0]).values;
  for (auto g : {FimGranularity::per_sample, FimGranularity::per_batch}) {
    check_close(fim_diagonal(m, many, g, 5).values, sq, 1e-12);
  }
}

TEST_CASE("FIM values are nonnegative, deterministic and counted as one pass") {
  const Model m = oracle::random_model({4, 6, 3}, 1);
  Dataset d = oracle::random_dataset(20, 4, 3, 2);
  d.role = DataRole::forget;
  PassMeter meter;
  const FimDiagonal f = fim_diagonal(m, d, FimGranularity::per_sample, 64, &meter);
  CHECK(meter.counts() == PassCounts{0, 1, 0});
  for (double v : f.values) CHECK(v >= 0.0);
  CHECK(fim_diagonal(m, d, FimGranularity::per_sample).values == f.values);
  CHECK(f.model_fingerprint == fingerprint(m));
  CHECK_THROWS_AS(fim_diagonal(m, Dataset{}, FimGranularity::per_sample), ConfigError);
  CHECK_THROWS_AS(fim_diagonal(m, d, FimGranularity::per_sample, 0), ConfigError);
}

TEST_CASE("fingerprint tracks parameters") {
  Model m = oracle::random_model({3, 4, 2}, 1);
  const auto fp = fingerprint(m);
  CHECK(fp == fingerprint(oracle::random_model({3, 4, 2}, 1)));
  m.params.values[5] = std::nextafter(m.params.values[5], 1e9);
  CHECK(fingerprint(m) != fp);
}

TEST_CASE("FIM file round trip and faults") {
  const Model m = oracle::random_model({3, 4, 2}, 6);
  const FimDiagonal f = fim_diagonal(m, oracle::random_dataset(9, 3, 2, 7), FimGranularity::per_batch, 4);
  const auto bytes = encode_fim(f);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SSDF");
  const FimDiagonal back = decode_fim(bytes);
  CHECK(back.values == f.values);
  CHECK(back.n_samples == f.n_samples);
  CHECK(back.granularity == f.granularity);
  CHECK(back.model_fingerprint == f.model_fingerprint);
  CHECK(encode_fim(back) == bytes);

  auto magic = bytes;
  magic[1] = 'X';
  CHECK(fim_fault(magic) == FormatFault::bad_magic);
  auto version = bytes;
  version[4] = 2;
  CHECK(fim_fault(version) == FormatFault::bad_version);
  CHECK(fim_fault(std::span(bytes).first(bytes.size() - 3)) == FormatFault::truncated);
  auto nofp = bytes;
  std::fill(nofp.begin() + 8, nofp.begin() + 16, std::uint8_t{0});
  CHECK(fim_fault(nofp) == FormatFault::missing_fingerprint);

  const auto path = std::filesystem::temp_directory_path() / "unlearn_fim_test.ssdf";
  save_fim(f, path);
  const LoadedFim ok = load_fim_checked(path, fingerprint(m));
  CHECK(!ok.warning);
  CHECK(ok.fim.values == f.values);
  const LoadedFim stale = load_fim_checked(path, fingerprint(m) ^ 1);
  CHECK(stale.warning.has_value());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_fim(path), IoError);
}

TEST_CASE("FIM validation and granularity names") {
  CHECK(parse_granularity("per_batch") == FimGranularity::per_batch);
  CHECK(std::string(to_string(FimGranularity::per_sample)) == "per_sample");
  CHECK_THROWS_AS(parse_granularity("batch"), ConfigError);
  FimDiagonal f = oracle::fim_of({1.0, -1.0});
  CHECK_THROWS_AS(f.validate(), NumericError);
  f.values = {1.0, NAN};
  CHECK_THROWS_AS(f.validate(), NumericError);
  f.values = {1.0};
  f.n_samples = 0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
}
