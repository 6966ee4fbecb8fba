// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include "unlearn/mia.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unlearn/error.hpp"
#include "unlearn/rng.hpp"

namespace unlearn {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// `count` distinct values from `values`, kept in their original order.
std::vector<double> sample_without_replacement(std::span<const double> values, std::size_t count, Rng& rng) {
  if (count >= values.size()) return {values.begin(), values.end()};
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i : idx) out.push_back(values[i]);
  return out;
}

}  // namespace

double AttackModel::member_probability(double loss) const noexcept { return sigmoid(weight * loss + bias); }

bool AttackModel::is_member(double loss) const noexcept { return member_probability(loss) > 0.5; }

AttackFit fit_attacker(std::span<const double> member_losses, std::span<const double> nonmember_losses,
                       const AttackOptions& opts) {
  if (member_losses.empty() || nonmember_losses.empty()) throw ConfigError("MIA attacker needs two nonempty pools");
  const std::size_t m = std::min(member_losses.size(), nonmember_losses.size());
  Rng rng(opts.seed);
  const std::vector<double> members = sample_without_replacement(member_losses, m, rng);
  const std::vector<double> nonmembers = sample_without_replacement(nonmember_losses, m, rng);

  std::vector<double> x;
  x.reserve(2 * m);
  x.insert(x.end(), members.begin(), members.end());
  x.insert(x.end(), nonmembers.begin(), nonmembers.end());
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("non-finite loss feature");
  }

  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  double scale = std::sqrt(var / n);
  if (!(scale > 0.0)) scale = 1.0;
  for (double& v : x) v = (v - mean) / scale;

  double w = 0.0;
  double b = 0.0;
  for (std::size_t it = 0; it < opts.iters; ++it) {
    double gw = 0.0;
    double gb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double target = i < m ? 1.0 : 0.0;
      const double err = sigmoid(w * x[i] + b) - target;
      gw += err * x[i];
      gb += err;
    }
    w -= opts.learning_rate * gw / n;
    b -= opts.learning_rate * gb / n;
  }

  AttackFit fit;
  fit.model.weight = w / scale;
  fit.model.bias = b - w * mean / scale;
  fit.members = m;
  fit.nonmembers = m;
  std::size_t correct = 0;
  for (double v : members) correct += fit.model.is_member(v);
  for (double v : nonmembers) correct += !fit.model.is_member(v);
  fit.train_accuracy = static_cast<double>(correct) / n;
  return fit;
}

std::vector<double> loss_features(const Model& model, const Dataset& data) { return per_sample_nll(model, data); }

MiaResult mia_score(const Model& model, const Dataset& retain, const Dataset& test, const Dataset& target,
                    std::uint64_t seed) {
  if (retain.empty() || test.empty()) throw ConfigError("MIA needs nonempty retain and test sets");
  if (target.empty()) throw ConfigError("MIA target set is empty");

  Rng rng(seed);
  const std::vector<double> retain_losses = loss_features(model, retain);
  const std::vector<double> members =
      sample_without_replacement(retain_losses, std::min(test.size(), retain.size()), rng);
  const std::vector<double> nonmembers = loss_features(model, test);

  AttackOptions opts;
  opts.seed = rng.next_u64();
  const AttackFit fit = fit_attacker(members, nonmembers, opts);

  std::size_t flagged = 0;
  for (double v : loss_features(model, target)) flagged += fit.model.is_member(v);

  MiaResult r;
  r.score_percent = 100.0 * static_cast<double>(flagged) / static_cast<double>(target.size());
  r.attacker_train_accuracy = fit.train_accuracy;
  r.members = fit.members;
  r.nonmembers = fit.nonmembers;
  return r;
}

}  // namespace unlearn
