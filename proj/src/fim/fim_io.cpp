// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>

#include "io/binary.hpp"
#include "unlearn/error.hpp"
#include "unlearn/fim.hpp"

namespace unlearn {
namespace {
constexpr std::string_view kMagic = "SSDF";

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::vector<std::uint8_t> encode_fim(const FimDiagonal& fim) {
  fim.validate();
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kFimVersion);
  w.u64(fim.model_fingerprint);
  w.u8(static_cast<std::uint8_t>(fim.granularity));
  w.u64(fim.n_samples);
  w.u64(fim.values.size());
  for (double v : fim.values) w.f64(v);
  return w.take();
}

FimDiagonal decode_fim(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "FIM file");
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw FormatError(FormatFault::bad_magic, "FIM file: bad magic, expected SSDF");
  }
  const std::uint32_t version = r.u32_le();
  if (version != kFimVersion) {
    throw FormatError(FormatFault::bad_version, "FIM file: unsupported version " + std::to_string(version));
  }
  FimDiagonal fim;
  fim.model_fingerprint = r.u64_le();
  if (fim.model_fingerprint == 0) {
    throw FormatError(FormatFault::missing_fingerprint, "FIM file: model fingerprint is absent");
  }
  const std::uint8_t g = r.u8();
  if (g > 1) throw FormatError(FormatFault::invalid_value, "FIM file: unknown granularity code");
  fim.granularity = static_cast<FimGranularity>(g);
  fim.n_samples = r.u64_le();
  const std::uint64_t length = r.u64_le();
  if (r.remaining() / 8 < length) throw FormatError(FormatFault::truncated, "FIM file: truncated values");
  if (r.remaining() != length * 8) throw FormatError(FormatFault::invalid_value, "FIM file: trailing bytes");
  fim.values.resize(length);
  for (double& v : fim.values) v = r.f64_le();
  try {
    fim.validate();
  } catch (const Error& e) {
    throw FormatError(FormatFault::invalid_value, std::string("FIM file: ") + e.what());
  }
  return fim;
}

void save_fim(const FimDiagonal& fim, const std::filesystem::path& path) { io::write_file(path, encode_fim(fim)); }

FimDiagonal load_fim(const std::filesystem::path& path) { return decode_fim(io::read_file(path)); }

LoadedFim load_fim_checked(const std::filesystem::path& path, std::uint64_t expected) {
  LoadedFim out{load_fim(path), std::nullopt};
  if (out.fim.model_fingerprint != expected) {
    out.warning = "FIM cache " + path.string() + " was computed for model " + hex64(out.fim.model_fingerprint) +
                  ", current model is " + hex64(expected);
  }
  return out;
}

}  // namespace unlearn
