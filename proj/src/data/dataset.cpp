// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "unlearn/dataset.hpp"
#include "unlearn/error.hpp"

namespace unlearn {

void Dataset::validate() const {
  if (features.rows != labels.size()) {
    throw ShapeError("dataset has " + std::to_string(features.rows) + " feature rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (features.values.size() != features.rows * features.cols) throw ShapeError("feature matrix storage mismatch");
  for (std::uint32_t y : labels) {
    if (y >= num_classes) throw ConfigError("label " + std::to_string(y) + " >= K=" + std::to_string(num_classes));
  }
  if (subclass_labels) {
    if (subclass_labels->size() != labels.size()) throw ShapeError("subclass label count mismatch");
    for (std::uint32_t s : *subclass_labels) {
      if (s >= num_subclasses) {
        throw ConfigError("subclass label " + std::to_string(s) + " >= S=" + std::to_string(num_subclasses));
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices, DataRole new_role) const {
  Dataset out;
  out.features = Matrix(indices.size(), features.cols);
  out.labels.reserve(indices.size());
  if (subclass_labels) out.subclass_labels.emplace().reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t i = indices[r];
    if (i >= size()) throw ShapeError("subset index out of range");
    const auto src = features.row(i);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(labels[i]);
    if (subclass_labels) out.subclass_labels->push_back((*subclass_labels)[i]);
  }
  out.num_classes = num_classes;
  out.num_subclasses = num_subclasses;
  out.split = split;
  out.role = new_role;
  return out;
}

Dataset concat(const Dataset& a, const Dataset& b, DataRole role) {
  if (!a.empty() && !b.empty() && a.dim() != b.dim()) throw ShapeError("concat: feature dims differ");
  if (a.num_classes != b.num_classes) throw ShapeError("concat: class counts differ");
  Dataset out;
  const std::size_t cols = a.empty() ? b.dim() : a.dim();
  out.features = Matrix(a.size() + b.size(), cols);
  std::copy(a.features.values.begin(), a.features.values.end(), out.features.values.begin());
  std::copy(b.features.values.begin(), b.features.values.end(),
            out.features.values.begin() + static_cast<std::ptrdiff_t>(a.features.values.size()));
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  if (a.subclass_labels && b.subclass_labels) {
    out.subclass_labels = *a.subclass_labels;
    out.subclass_labels->insert(out.subclass_labels->end(), b.subclass_labels->begin(), b.subclass_labels->end());
    out.num_subclasses = std::max(a.num_subclasses, b.num_subclasses);
  }
  out.num_classes = a.num_classes;
  out.split = a.split;
  out.role = role;
  return out;
}

}  // namespace unlearn
