// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <numeric>
#include <string>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/error.hpp"
#include "unlearn/rng.hpp"

namespace unlearn {
namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "' in forget spec");
  }
  return value;
}

std::vector<std::string_view> split_colon(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

ForgetSpec parse_forget_spec(std::string_view text) {
  const auto parts = split_colon(text);
  if (parts[0] == "class" && parts.size() == 2) {
    return ForgetSpec::full_class(parse_number<std::uint32_t>(parts[1], "class"));
  }
  if (parts[0] == "subclass" && parts.size() == 3) {
    return ForgetSpec::subclass(parse_number<std::uint32_t>(parts[1], "superclass"),
                                parse_number<std::uint32_t>(parts[2], "subclass"));
  }
  if (parts[0] == "random" && parts.size() == 3) {
    return ForgetSpec::random_n(parse_number<std::size_t>(parts[1], "count"),
                                parse_number<std::uint64_t>(parts[2], "seed"));
  }
  throw ConfigError("forget spec must be class:K, subclass:K:S or random:N:SEED, got '" + std::string(text) + "'");
}

std::string to_string(const ForgetSpec& spec) {
  switch (spec.kind) {
    case ForgetSpec::Kind::full_class: return "class:" + std::to_string(spec.cls);
    case ForgetSpec::Kind::subclass: return "subclass:" + std::to_string(spec.cls) + ":" + std::to_string(spec.sub);
    case ForgetSpec::Kind::random_n: return "random:" + std::to_string(spec.count) + ":" + std::to_string(spec.seed);
  }
  return "?";
}

bool forgets_test_row(const ForgetSpec& spec, std::uint32_t label, std::uint32_t sub) {
  switch (spec.kind) {
    case ForgetSpec::Kind::full_class: return label == spec.cls;
    case ForgetSpec::Kind::subclass: return label == spec.cls && sub == spec.sub;
    case ForgetSpec::Kind::random_n: return false;
  }
  return false;
}

ForgetSplit split_forget(const Dataset& data, const ForgetSpec& spec) {
  const std::size_t n = data.size();
  std::vector<bool> forget(n, false);
  switch (spec.kind) {
    case ForgetSpec::Kind::full_class:
      if (spec.cls >= data.num_classes) throw ConfigError("forget class " + std::to_string(spec.cls) + " does not exist");
      for (std::size_t i = 0; i < n; ++i) forget[i] = data.labels[i] == spec.cls;
      break;
    case ForgetSpec::Kind::subclass:
      if (!data.subclass_labels) throw ConfigError("subclass forgetting needs a dataset with subclass labels");
      if (spec.cls >= data.num_classes || spec.sub >= data.num_subclasses) {
        throw ConfigError("forget subclass " + to_string(spec) + " does not exist");
      }
      for (std::size_t i = 0; i < n; ++i) {
        forget[i] = data.labels[i] == spec.cls && (*data.subclass_labels)[i] == spec.sub;
      }
      break;
    case ForgetSpec::Kind::random_n: {
      if (spec.count > n) {
        throw ConfigError("cannot forget " + std::to_string(spec.count) + " of " + std::to_string(n) + " samples");
      }
      // Partial Fisher-Yates: the first `count` slots are a uniform sample
      // without replacement.
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      Rng rng(spec.seed);
      for (std::size_t i = 0; i < spec.count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
        forget[pool[i]] = true;
      }
      break;
    }
  }

  ForgetSplit out;
  out.spec = spec;
  for (std::size_t i = 0; i < n; ++i) (forget[i] ? out.forget_indices : out.retain_indices).push_back(i);
  out.retain = data.subset(out.retain_indices, DataRole::retain);
  out.forget = data.subset(out.forget_indices, DataRole::forget);
  return out;
}

}  // namespace unlearn
