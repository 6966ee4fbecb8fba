// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "unlearn/dataset.hpp"
#include "unlearn/error.hpp"
#include "unlearn/rng.hpp"

namespace unlearn {
namespace {

std::vector<double> random_direction(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

Dataset empty_like(const SyntheticSpec& spec, std::size_t rows, SplitTag tag, DataRole role) {
  Dataset d;
  d.features = Matrix(0, spec.dim);
  d.features.values.reserve(rows * spec.dim);
  d.labels.reserve(rows);
  d.subclass_labels.emplace().reserve(rows);
  d.num_classes = spec.superclasses;
  d.num_subclasses = spec.subclasses_per_super;
  d.split = tag;
  d.role = role;
  return d;
}

void append_row(Dataset& d, const std::vector<double>& x, std::uint32_t label, std::uint32_t sub) {
  d.features.values.insert(d.features.values.end(), x.begin(), x.end());
  ++d.features.rows;
  d.labels.push_back(label);
  d.subclass_labels->push_back(sub);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (superclasses == 0 || subclasses_per_super == 0 || samples_per_subclass == 0 || dim == 0) {
    throw ConfigError("synthetic spec counts and dim must be positive");
  }
  if (samples_per_subclass < 2) throw ConfigError("need at least 2 samples per subclass for a train/test split");
  if (!(cluster_spread > 0.0) || !std::isfinite(cluster_spread)) throw ConfigError("cluster_spread must be positive");
  if (!(sub_separation > 0.0)) throw ConfigError("sub_separation must be positive");
  if (!(super_separation > sub_separation) || !std::isfinite(super_separation)) {
    throw ConfigError("super_separation must exceed sub_separation");
  }
}

TrainTestSplit gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n_test = std::max<std::size_t>(1, spec.samples_per_subclass / 5);
  const std::size_t n_train = spec.samples_per_subclass - n_test;
  const std::size_t groups = spec.superclasses * spec.subclasses_per_super;

  TrainTestSplit out{empty_like(spec, groups * n_train, SplitTag::train, DataRole::full),
                     empty_like(spec, groups * n_test, SplitTag::test, DataRole::test)};

  Rng rng(spec.seed);
  std::vector<double> x(spec.dim);
  for (std::size_t k = 0; k < spec.superclasses; ++k) {
    std::vector<double> super_center = random_direction(rng, spec.dim);
    for (double& c : super_center) c *= spec.super_separation;
    for (std::size_t s = 0; s < spec.subclasses_per_super; ++s) {
      std::vector<double> center = random_direction(rng, spec.dim);
      for (std::size_t j = 0; j < spec.dim; ++j) center[j] = super_center[j] + spec.sub_separation * center[j];
      for (std::size_t i = 0; i < spec.samples_per_subclass; ++i) {
        for (std::size_t j = 0; j < spec.dim; ++j) x[j] = center[j] + spec.cluster_spread * rng.normal();
        Dataset& dst = i < n_train ? out.train : out.test;
        append_row(dst, x, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(s));
      }
    }
  }
  return out;
}

}  // namespace unlearn
