// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "support/oracles.hpp"
#include "unlearn/dataset.hpp"
#include "unlearn/error.hpp"

using namespace unlearn;

namespace {

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

std::filesystem::path write_bytes(const std::string& name, const std::vector<std::uint8_t>& bytes) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                          static_cast<std::streamsize>(bytes.size()));
  return p;
}

std::vector<std::uint8_t> idx_images(std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                     const std::vector<std::uint8_t>& pixels) {
  std::vector<std::uint8_t> b;
  put_be32(b, 0x803);
  put_be32(b, count);
  put_be32(b, rows);
  put_be32(b, cols);
  b.insert(b.end(), pixels.begin(), pixels.end());
  return b;
}

std::vector<std::uint8_t> idx_labels(const std::vector<std::uint8_t>& labels, std::uint32_t count) {
  std::vector<std::uint8_t> b;
  put_be32(b, 0x801);
  put_be32(b, count);
  b.insert(b.end(), labels.begin(), labels.end());
  return b;
}

FormatFault idx_fault(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels) {
  const auto ip = write_bytes("unlearn_idx_i", images);
  const auto lp = write_bytes("unlearn_idx_l", labels);
  try {
    load_idx(ip, lp);
  } catch (const FormatError& e) {
    return e.fault();
  }
  FAIL("load succeeded");
  return FormatFault::invalid_value;
}

}  // namespace

TEST_CASE("synthetic benchmark shape and stratification") {
  const SyntheticSpec spec;
  const auto [train, test] = gen_synthetic(spec);
  CHECK(train.size() == 800);
  CHECK(test.size() == 200);
  CHECK(train.dim() == 16);
  CHECK(train.num_classes == 5);
  CHECK(train.num_subclasses == 4);
  CHECK(train.split == SplitTag::train);
  CHECK(test.split == SplitTag::test);
  CHECK_NOTHROW(train.validate());
  CHECK_NOTHROW(test.validate());
  for (std::uint32_t k = 0; k < 5; ++k) {
    for (std::uint32_t s = 0; s < 4; ++s) {
      auto count = [&](const Dataset& d) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < d.size(); ++i) c += d.labels[i] == k && (*d.subclass_labels)[i] == s;
        return c;
      };
      CHECK(count(train) == 40);
      CHECK(count(test) == 10);
    }
  }
}

TEST_CASE("synthetic generation is deterministic in the seed") {
  SyntheticSpec spec;
  const auto a = gen_synthetic(spec);
  const auto b = gen_synthetic(spec);
  CHECK(a.train.features == b.train.features);
  CHECK(a.test.labels == b.test.labels);
  spec.seed += 1;
  CHECK(gen_synthetic(spec).train.features != a.train.features);
}

TEST_CASE("zero spread puts every sample on its subclass center") {
  SyntheticSpec spec;
  spec.cluster_spread = 1e-300;
  const auto [train, test] = gen_synthetic(spec);
  for (std::size_t i = 1; i < train.size(); ++i) {
    if (train.labels[i] == train.labels[0] && (*train.subclass_labels)[i] == (*train.subclass_labels)[0]) {
      for (std::size_t j = 0; j < train.dim(); ++j) CHECK(train.features(i, j) == doctest::Approx(train.features(0, j)));
    }
  }
}

TEST_CASE("synthetic spec validation") {
  SyntheticSpec s;
  s.sub_separation = s.super_separation;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.samples_per_subclass = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.cluster_spread = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("forget specs parse and print") {
  CHECK(parse_forget_spec("class:3") == ForgetSpec::full_class(3));
  CHECK(parse_forget_spec("subclass:1:2") == ForgetSpec::subclass(1, 2));
  CHECK(parse_forget_spec("random:20:9") == ForgetSpec::random_n(20, 9));
  CHECK(to_string(ForgetSpec::subclass(1, 2)) == "subclass:1:2");
  for (const char* bad : {"", "class", "class:x", "class:1:2", "subclass:1", "random:5", "rand:1:2", "class:-1"}) {
    CHECK_THROWS_AS(parse_forget_spec(bad), ConfigError);
  }
}

TEST_CASE("forget splits partition the data") {
  const auto data = gen_synthetic(SyntheticSpec{}).train;
  for (const ForgetSpec& spec : {ForgetSpec::full_class(2), ForgetSpec::subclass(1, 3), ForgetSpec::random_n(37, 4),
                                 ForgetSpec::random_n(0, 1), ForgetSpec::random_n(800, 2)}) {
    CAPTURE(to_string(spec));
    const ForgetSplit s = split_forget(data, spec);
    CHECK(s.retain.size() + s.forget.size() == data.size());
    CHECK(s.retain.role == DataRole::retain);
    CHECK(s.forget.role == DataRole::forget);
    std::vector<std::size_t> all = s.retain_indices;
    all.insert(all.end(), s.forget_indices.begin(), s.forget_indices.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    CHECK(std::is_sorted(s.retain_indices.begin(), s.retain_indices.end()));
    CHECK(std::is_sorted(s.forget_indices.begin(), s.forget_indices.end()));
    for (std::size_t i = 0; i < s.forget.size(); ++i) {
      const std::size_t src = s.forget_indices[i];
      CHECK(s.forget.labels[i] == data.labels[src]);
      CHECK(s.forget.features.row(i)[0] == data.features.row(src)[0]);
    }
  }
  const ForgetSplit c = split_forget(data, ForgetSpec::full_class(2));
  CHECK(c.forget.size() == 160);
  for (auto y : c.forget.labels) CHECK(y == 2);
  for (auto y : c.retain.labels) CHECK(y != 2);
  const ForgetSplit sc = split_forget(data, ForgetSpec::subclass(1, 3));
  CHECK(sc.forget.size() == 40);
  CHECK(split_forget(data, ForgetSpec::random_n(37, 4)).forget.size() == 37);
  CHECK(split_forget(data, ForgetSpec::random_n(800, 2)).retain.empty());
}

TEST_CASE("random forgetting depends only on its own seed") {
  const Dataset data = oracle::random_dataset(200, 2, 3, 1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = split_forget(data, ForgetSpec::random_n(10, seed)).forget_indices;
    CHECK(a == split_forget(data, ForgetSpec::random_n(10, seed)).forget_indices);
    CHECK(a != split_forget(data, ForgetSpec::random_n(10, seed + 100)).forget_indices);
  }
}

TEST_CASE("invalid forget specs are rejected") {
  const auto data = gen_synthetic(SyntheticSpec{}).train;
  CHECK_THROWS_AS(split_forget(data, ForgetSpec::full_class(5)), ConfigError);
  CHECK_THROWS_AS(split_forget(data, ForgetSpec::subclass(0, 4)), ConfigError);
  CHECK_THROWS_AS(split_forget(data, ForgetSpec::random_n(801, 0)), ConfigError);
  const Dataset flat = oracle::random_dataset(10, 2, 2, 1);
  CHECK_THROWS_AS(split_forget(flat, ForgetSpec::subclass(0, 0)), ConfigError);
}

TEST_CASE("test rows matching the forget target") {
  CHECK(forgets_test_row(ForgetSpec::full_class(1), 1, 3));
  CHECK(!forgets_test_row(ForgetSpec::full_class(1), 2, 3));
  CHECK(forgets_test_row(ForgetSpec::subclass(1, 3), 1, 3));
  CHECK(!forgets_test_row(ForgetSpec::subclass(1, 3), 1, 2));
  CHECK(!forgets_test_row(ForgetSpec::random_n(5, 1), 0, 0));
}

TEST_CASE("IDX loading") {
  SUBCASE("single pixel at full intensity") {
    const auto ip = write_bytes("unlearn_idx_1i", idx_images(1, 1, 1, {255}));
    const auto lp = write_bytes("unlearn_idx_1l", idx_labels({4}, 1));
    const Dataset d = load_idx(ip, lp);
    CHECK(d.size() == 1);
    CHECK(d.features.values == std::vector<double>{1.0});
    CHECK(d.num_classes == 5);
  }
  SUBCASE("labels pass through and pixels are row-major") {
    const auto ip = write_bytes("unlearn_idx_2i", idx_images(2, 1, 2, {0, 51, 102, 255}));
    const auto lp = write_bytes("unlearn_idx_2l", idx_labels({3, 7}, 2));
    const Dataset d = load_idx(ip, lp);
    CHECK(d.labels == std::vector<std::uint32_t>{3, 7});
    CHECK(d.dim() == 2);
    CHECK(d.features(0, 1) == doctest::Approx(0.2));
    CHECK(d.features(1, 0) == doctest::Approx(0.4));
    CHECK(d.num_classes == 8);
  }
  SUBCASE("format faults") {
    auto bad_magic = idx_images(1, 1, 1, {1});
    bad_magic[3] = 0x01;
    CHECK(idx_fault(bad_magic, idx_labels({0}, 1)) == FormatFault::bad_magic);
    CHECK(idx_fault(idx_images(1, 1, 1, {1}), idx_images(1, 1, 1, {1})) == FormatFault::bad_magic);
    CHECK(idx_fault(idx_images(3, 1, 1, {1, 2}), idx_labels({0, 0, 0}, 3)) == FormatFault::truncated);
    CHECK(idx_fault(idx_images(2, 1, 1, {1, 2}), idx_labels({0}, 2)) == FormatFault::truncated);
    CHECK(idx_fault(idx_images(2, 1, 1, {1, 2}), idx_labels({0}, 1)) == FormatFault::count_mismatch);
  }
  CHECK_THROWS_AS(load_idx("/nonexistent/a", "/nonexistent/b"), IoError);
}

TEST_CASE("subset, filter and concat") {
  const auto data = gen_synthetic(SyntheticSpec{}).test;
  const std::size_t idx[] = {5, 0, 9};
  const Dataset s = data.subset(idx, DataRole::derived);
  CHECK(s.size() == 3);
  CHECK(s.labels[0] == data.labels[5]);
  CHECK((*s.subclass_labels)[2] == (*data.subclass_labels)[9]);
  const Dataset f = data.filter([](std::uint32_t y, std::uint32_t) { return y == 4; }, DataRole::test);
  CHECK(f.size() == 40);
  const Dataset c = concat(s, f, DataRole::derived);
  CHECK(c.size() == 43);
  CHECK(c.features.row(3)[0] == f.features.row(0)[0]);
  const std::size_t oob[] = {1000};
  CHECK_THROWS(data.subset(oob, DataRole::derived));
}
