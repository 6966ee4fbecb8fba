// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <tuple>

#include "unlearn/error.hpp"
#include "unlearn/harness.hpp"

namespace unlearn::harness {

GridResult grid_search(PreparedExperiment& prep, const GridSpec& grid) {
  if (grid.alphas.empty() || grid.lambdas.empty()) throw ConfigError("grid search needs nonempty alpha and lambda lists");
  if (prep.split.forget.empty()) throw ConfigError("grid search needs a nonempty forget set");
  const ExperimentConfig& cfg = prep.cfg;

  GridResult out;
  const ExperimentResult base = evaluate(prep, "baseline", prep.baseline);
  out.baseline_retain_acc = base.retain_acc;
  out.baseline_forget_acc = base.forget_acc;
  const ExperimentResult gold = run_method(prep, MethodSpec{MethodKind::retrain, {}, "retrain"});
  out.retrain_mia = gold.mia;
  out.retrain_forget_acc = gold.forget_acc;

  // Both importances are fixed across cells; only the dampening step varies.
  PassMeter meter;
  const FimDiagonal full = full_fim(prep, meter, prep.warnings);
  const FimDiagonal forget = fim_diagonal(prep.baseline, prep.split.forget, cfg.granularity, cfg.fim_batch_size);

  for (double alpha : grid.alphas) {
    for (double lambda : grid.lambdas) {
      const SsdParams params{alpha, lambda};
      params.validate();
      DampeningResult d = ssd_dampen(prep.baseline.params, full, forget, params);
      const ExperimentResult r = evaluate(prep, "ssd", Model{prep.baseline.spec, std::move(d.theta)});
      GridCell cell;
      cell.alpha = alpha;
      cell.lambda = lambda;
      cell.retain_acc = r.retain_acc;
      cell.forget_acc = r.forget_acc;
      cell.mia = r.mia;
      cell.retain_drop = base.retain_acc - r.retain_acc;
      cell.objective = std::abs(r.mia - gold.mia) + std::max(0.0, cell.retain_drop - grid.retain_tolerance);
      cell.selected_fraction = d.report.selected_fraction;
      out.cells.push_back(cell);
    }
  }
  std::sort(out.cells.begin(), out.cells.end(), [](const GridCell& a, const GridCell& b) {
    return std::tie(a.objective, a.forget_acc, a.alpha, a.lambda) <
           std::tie(b.objective, b.forget_acc, b.alpha, b.lambda);
  });
  return out;
}

GridResult grid_search(const ExperimentConfig& cfg) {
  PreparedExperiment prep = prepare(cfg);
  return grid_search(prep, cfg.grid);
}

}  // namespace unlearn::harness
