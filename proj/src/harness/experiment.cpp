// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>

#include "unlearn/checkpoint.hpp"
#include "unlearn/error.hpp"
#include "unlearn/harness.hpp"

namespace unlearn::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double percent(const Model& model, const Dataset& data) { return 100.0 * accuracy(model, data); }

TrainTestSplit load_data(const DatasetSource& src) {
  if (src.kind == DatasetSource::Kind::synthetic) return gen_synthetic(src.synthetic);
  TrainTestSplit out;
  out.train = load_idx(src.train_images, src.train_labels);
  out.test = load_idx(src.test_images, src.test_labels);
  out.train.split = SplitTag::train;
  out.train.role = DataRole::full;
  out.test.split = SplitTag::test;
  out.test.role = DataRole::test;
  if (out.train.dim() != out.test.dim()) throw ShapeError("train and test images differ in size");
  const std::size_t k = std::max(out.train.num_classes, out.test.num_classes);
  out.train.num_classes = k;
  out.test.num_classes = k;
  return out;
}

BaselineConfig baseline_config(const ExperimentConfig& cfg) {
  BaselineConfig b;
  b.train_cfg = cfg.train;
  if (cfg.baseline_learning_rate) b.train_cfg.learning_rate = *cfg.baseline_learning_rate;
  b.finetune_epochs = cfg.finetune_epochs;
  b.amnesiac_epochs = cfg.amnesiac_epochs;
  b.relabel_seed = cfg.relabel_seed;
  return b;
}

void require_forget(const PreparedExperiment& prep, const MethodSpec& method) {
  if (prep.split.forget.empty()) throw ConfigError(method.name + " needs a nonempty forget set");
}

}  // namespace

PreparedExperiment prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  PreparedExperiment prep;
  prep.cfg = cfg;
  TrainTestSplit data = load_data(cfg.dataset);
  prep.train = std::move(data.train);
  prep.test = std::move(data.test);
  prep.split = split_forget(prep.train, cfg.forget);
  const ForgetSpec spec = cfg.forget;
  prep.test_retain = prep.test.filter([&](auto y, auto s) { return !forgets_test_row(spec, y, s); }, DataRole::test);
  prep.test_forget = prep.test.filter([&](auto y, auto s) { return forgets_test_row(spec, y, s); }, DataRole::test);

  prep.spec.layer_dims.push_back(prep.train.dim());
  prep.spec.layer_dims.insert(prep.spec.layer_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  prep.spec.layer_dims.push_back(prep.train.num_classes);
  prep.spec.seed = cfg.model_seed;
  prep.spec.validate();

  if (cfg.model_checkpoint) {
    prep.baseline = load_checkpoint(*cfg.model_checkpoint);
    if (prep.baseline.spec.layer_dims != prep.spec.layer_dims) {
      throw ShapeError("checkpoint architecture does not match the configured model");
    }
    prep.baseline.spec.seed = cfg.model_seed;
  } else {
    prep.baseline = train(init_model(prep.spec), prep.train, cfg.train);
  }
  prep.setup_seconds = seconds_since(start);
  return prep;
}

FimDiagonal full_fim(const PreparedExperiment& prep, PassMeter& meter, std::vector<std::string>& warnings) {
  const ExperimentConfig& cfg = prep.cfg;
  const std::uint64_t expected = fingerprint(prep.baseline);
  if (cfg.fim_cache_path && std::filesystem::exists(*cfg.fim_cache_path)) {
    std::optional<std::string> problem;
    try {
      LoadedFim loaded = load_fim_checked(*cfg.fim_cache_path, expected);
      if (loaded.warning) {
        problem = *loaded.warning;
      } else if (loaded.fim.granularity != cfg.granularity) {
        problem = "FIM cache granularity differs from the configured one";
      } else if (loaded.fim.values.size() != prep.baseline.params.size()) {
        problem = "FIM cache length differs from the model parameter count";
      } else {
        return std::move(loaded.fim);
      }
    } catch (const FormatError& e) {
      problem = std::string("unreadable FIM cache: ") + e.what();
    }
    warnings.push_back(*problem + "; recomputing " + cfg.fim_cache_path->string());
  }
  FimDiagonal fim = fim_diagonal(prep.baseline, prep.train, cfg.granularity, cfg.fim_batch_size, &meter);
  if (cfg.fim_cache_path) save_fim(fim, *cfg.fim_cache_path);
  return fim;
}

std::filesystem::path fim_cache(PreparedExperiment& prep) {
  if (!prep.cfg.fim_cache_path) throw ConfigError("no FIM cache path configured");
  const FimDiagonal fim =
      fim_diagonal(prep.baseline, prep.train, prep.cfg.granularity, prep.cfg.fim_batch_size);
  save_fim(fim, *prep.cfg.fim_cache_path);
  return *prep.cfg.fim_cache_path;
}

ExperimentResult evaluate(const PreparedExperiment& prep, std::string method, const Model& model) {
  if (!model.params.all_finite()) throw NumericError(method + " produced non-finite parameters");
  ExperimentResult r;
  r.method = std::move(method);
  r.retain_acc = percent(model, prep.test_retain);
  if (!prep.split.retain.empty()) r.retain_train_acc = percent(model, prep.split.retain);
  if (!prep.test_forget.empty()) r.forget_test_acc = percent(model, prep.test_forget);
  if (!prep.split.forget.empty()) {
    r.forget_acc = percent(model, prep.split.forget);
    if (!prep.split.retain.empty()) {
      const MiaResult mia = mia_score(model, prep.split, prep.test, prep.cfg.mia_seed);
      r.mia = mia.score_percent;
      r.mia_attacker_accuracy = mia.attacker_train_accuracy;
    }
  }
  return r;
}

ExperimentResult run_method(PreparedExperiment& prep, const MethodSpec& method) {
  const ExperimentConfig& cfg = prep.cfg;
  PassMeter meter;
  std::optional<DampeningReport> report;
  std::optional<SsdParams> params;
  Model out;

  const auto start = Clock::now();
  switch (method.kind) {
    case MethodKind::ssd: {
      require_forget(prep, method);
      const FimDiagonal full = full_fim(prep, meter, prep.warnings);
      const FimDiagonal forget =
          fim_diagonal(prep.baseline, prep.split.forget, cfg.granularity, cfg.fim_batch_size, &meter);
      DampeningResult d = ssd_dampen(prep.baseline.params, full, forget, method.ssd);
      out = Model{prep.baseline.spec, std::move(d.theta)};
      report = std::move(d.report);
      params = method.ssd;
      break;
    }
    case MethodKind::naive_prune: {
      require_forget(prep, method);
      const FimDiagonal forget =
          fim_diagonal(prep.baseline, prep.split.forget, cfg.granularity, cfg.fim_batch_size, &meter);
      DampeningResult d = naive_prune(prep.baseline.params, forget);
      out = Model{prep.baseline.spec, std::move(d.theta)};
      report = std::move(d.report);
      break;
    }
    case MethodKind::select_prune: {
      require_forget(prep, method);
      const FimDiagonal full = full_fim(prep, meter, prep.warnings);
      const FimDiagonal forget =
          fim_diagonal(prep.baseline, prep.split.forget, cfg.granularity, cfg.fim_batch_size, &meter);
      DampeningResult d = select_prune(prep.baseline.params, full, forget, method.ssd.alpha);
      out = Model{prep.baseline.spec, std::move(d.theta)};
      report = std::move(d.report);
      params = SsdParams{method.ssd.alpha, 0.0};
      break;
    }
    case MethodKind::retrain:
      out = retrain_gold(prep.split.retain, prep.spec, cfg.train, &meter);
      break;
    case MethodKind::finetune:
      out = finetune(prep.baseline, prep.split, baseline_config(cfg), &meter);
      break;
    case MethodKind::amnesiac:
      require_forget(prep, method);
      out = amnesiac(prep.baseline, prep.split, baseline_config(cfg), &meter);
      break;
  }
  const double method_seconds = seconds_since(start);

  ExperimentResult r = evaluate(prep, method.name, out);
  r.wall_time_seconds = method_seconds;
  r.wall_time_inclusive_seconds = prep.setup_seconds + seconds_since(start);
  r.passes = meter.counts();
  r.ssd_params = params;
  r.dampening = std::move(report);
  return r;
}

ExperimentReport run_experiment(PreparedExperiment& prep) {
  ExperimentReport report;
  report.config = config_to_json(prep.cfg);
  const auto start = Clock::now();
  ExperimentResult base = evaluate(prep, "baseline", prep.baseline);
  base.wall_time_inclusive_seconds = prep.setup_seconds + seconds_since(start);
  report.rows.push_back(std::move(base));
  for (const MethodSpec& m : prep.cfg.methods) report.rows.push_back(run_method(prep, m));
  report.warnings = prep.warnings;
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  PreparedExperiment prep = prepare(cfg);
  return run_experiment(prep);
}

}  // namespace unlearn::harness
