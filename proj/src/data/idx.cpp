// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "io/binary.hpp"
#include "unlearn/dataset.hpp"
#include "unlearn/error.hpp"

namespace unlearn {
namespace {
constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;
}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto image_bytes = io::read_file(images);
  const auto label_bytes = io::read_file(labels);

  io::ByteReader ir(image_bytes, images.string());
  if (ir.u32_be() != kImagesMagic) {
    throw FormatError(FormatFault::bad_magic, images.string() + ": not an IDX image file (magic 0x00000803)");
  }
  const std::uint32_t count = ir.u32_be();
  const std::uint32_t rows = ir.u32_be();
  const std::uint32_t cols = ir.u32_be();

  io::ByteReader lr(label_bytes, labels.string());
  if (lr.u32_be() != kLabelsMagic) {
    throw FormatError(FormatFault::bad_magic, labels.string() + ": not an IDX label file (magic 0x00000801)");
  }
  const std::uint32_t label_count = lr.u32_be();
  if (label_count != count) {
    throw FormatError(FormatFault::count_mismatch, "IDX image count " + std::to_string(count) +
                                                       " differs from label count " + std::to_string(label_count));
  }

  const std::size_t dim = std::size_t{rows} * cols;
  if (dim == 0) throw FormatError(FormatFault::invalid_value, images.string() + ": zero-sized images");
  const auto pixels = ir.take(std::size_t{count} * dim);
  const auto raw_labels = lr.take(count);

  Dataset d;
  d.features = Matrix(count, dim);
  std::transform(pixels.begin(), pixels.end(), d.features.values.begin(),
                 [](std::uint8_t p) { return static_cast<double>(p) / 255.0; });
  d.labels.assign(raw_labels.begin(), raw_labels.end());
  const auto max_label = std::max_element(d.labels.begin(), d.labels.end());
  d.num_classes = max_label == d.labels.end() ? 0 : std::size_t{*max_label} + 1;
  d.split = SplitTag::train;
  d.role = DataRole::full;
  return d;
}

}  // namespace unlearn
