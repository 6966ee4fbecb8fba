// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "io/binary.hpp"
#include "support/oracles.hpp"
#include "unlearn/checkpoint.hpp"
#include "unlearn/error.hpp"

using namespace unlearn;

namespace {

FormatFault fault_of(std::span<const std::uint8_t> bytes) {
  try {
    decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    return e.fault();
  }
  FAIL("decode succeeded");
  return FormatFault::invalid_value;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-identical") {
  const Model m = oracle::random_model({5, 7, 3}, 4);
  const auto bytes = encode_checkpoint(m);
  const Model back = decode_checkpoint(bytes);
  CHECK(back.spec.layer_dims == m.spec.layer_dims);
  CHECK(back.params.values == m.params.values);
  CHECK(back.params.layout == m.params.layout);
  CHECK(encode_checkpoint(back) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "unlearn_ckpt_test.ssdc";
  save_checkpoint(m, path);
  const Model loaded = load_checkpoint(path);
  CHECK(loaded.params.values == m.params.values);
  save_checkpoint(loaded, path);
  CHECK(io::read_file(path) == bytes);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint header layout") {
  const Model m = oracle::random_model({2, 3}, 1);
  const auto b = encode_checkpoint(m);
  CHECK(std::string(b.begin(), b.begin() + 4) == "SSDC");
  CHECK(b[4] == 1);  // version, little-endian
  CHECK(b[8] == 2);  // two layer dims
  CHECK(b.size() == 4 + 4 + 4 + 2 * 4 + 1 + 8 + 9 * 8);
}

TEST_CASE("corrupt checkpoints raise distinct faults") {
  const auto good = encode_checkpoint(oracle::random_model({3, 4, 2}, 2));

  auto magic = good;
  magic[0] = 'X';
  CHECK(fault_of(magic) == FormatFault::bad_magic);

  auto version = good;
  version[4] += 1;
  CHECK(fault_of(version) == FormatFault::bad_version);

  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, good.size() - 1}) {
    CHECK(fault_of(std::span(good).first(cut)) == FormatFault::truncated);
  }

  auto count = good;
  const std::size_t count_at = 4 + 4 + 4 + 3 * 4 + 1;
  count[count_at] += 1;
  CHECK(fault_of(count) == FormatFault::count_mismatch);

  auto trailing = good;
  trailing.push_back(0);
  CHECK(fault_of(trailing) == FormatFault::invalid_value);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/model.ssdc"), IoError);
}
