// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "io/binary.hpp"
#include "unlearn/error.hpp"

namespace unlearn {
namespace {
constexpr std::string_view kMagic = "SSDC";
}

std::vector<std::uint8_t> encode_checkpoint(const Model& model) {
  model.spec.validate();
  if (model.params.values.size() != model.spec.param_count()) {
    throw ShapeError("model parameters do not match its spec");
  }
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(model.spec.layer_dims.size()));
  for (std::size_t d : model.spec.layer_dims) w.u32(static_cast<std::uint32_t>(d));
  w.u8(static_cast<std::uint8_t>(model.spec.activation));
  w.u64(model.params.values.size());
  for (double v : model.params.values) w.f64(v);
  return w.take();
}

Model decode_checkpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "checkpoint");
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw FormatError(FormatFault::bad_magic, "checkpoint: bad magic, expected SSDC");
  }
  const std::uint32_t version = r.u32_le();
  if (version != kCheckpointVersion) {
    throw FormatError(FormatFault::bad_version,
                      "checkpoint: unsupported version " + std::to_string(version));
  }
  ModelSpec spec;
  const std::uint32_t layers = r.u32_le();
  if (layers > r.remaining() / 4) throw FormatError(FormatFault::truncated, "checkpoint: truncated layer dims");
  for (std::uint32_t i = 0; i < layers; ++i) spec.layer_dims.push_back(r.u32_le());
  const std::uint8_t act = r.u8();
  if (act != static_cast<std::uint8_t>(Activation::relu)) {
    throw FormatError(FormatFault::invalid_value, "checkpoint: unknown activation code " + std::to_string(act));
  }
  spec.activation = Activation::relu;
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw FormatError(FormatFault::invalid_value, std::string("checkpoint: ") + e.what());
  }
  const std::uint64_t count = r.u64_le();
  if (count != spec.param_count()) {
    throw FormatError(FormatFault::count_mismatch, "checkpoint: parameter count " + std::to_string(count) +
                                                       " does not match layer dims");
  }
  if (r.remaining() < count * 8) throw FormatError(FormatFault::truncated, "checkpoint: truncated parameters");
  if (r.remaining() > count * 8) throw FormatError(FormatFault::invalid_value, "checkpoint: trailing bytes");

  Model model{spec, {}};
  model.params.layout = make_layout(spec);
  model.params.values.resize(count);
  for (double& v : model.params.values) {
    v = r.f64_le();
    if (!std::isfinite(v)) throw FormatError(FormatFault::invalid_value, "checkpoint: non-finite parameter");
  }
  return model;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  io::write_file(path, encode_checkpoint(model));
}

Model load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path));
}

}  // namespace unlearn
