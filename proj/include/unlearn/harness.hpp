// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment orchestration: configuration, per-method runs with timing and
// pass accounting, (alpha, lambda) grid search, CSV/JSON output.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "unlearn/baselines.hpp"
#include "unlearn/dampening.hpp"
#include "unlearn/dataset.hpp"
#include "unlearn/fim.hpp"
#include "unlearn/mia.hpp"
#include "unlearn/model.hpp"
#include "unlearn/pass_meter.hpp"

namespace unlearn::harness {

// ---------------------------------------------------------------------------
// Configuration

struct DatasetSource {
  enum class Kind : std::uint8_t { synthetic, idx };
  Kind kind = Kind::synthetic;
  SyntheticSpec synthetic;
  std::filesystem::path train_images, train_labels, test_images, test_labels;
};

enum class MethodKind : std::uint8_t { ssd, naive_prune, select_prune, retrain, finetune, amnesiac };

struct MethodSpec {
  MethodKind kind = MethodKind::ssd;
  SsdParams ssd;  // select_prune uses ssd.alpha
  std::string name;

  friend bool operator==(const MethodSpec& a, const MethodSpec& b) {
    return a.kind == b.kind && a.ssd.alpha == b.ssd.alpha && a.ssd.lambda == b.ssd.lambda && a.name == b.name;
  }
};

/// "ssd", "ssd:ALPHA:LAMBDA", "select_prune", "select_prune:ALPHA",
/// "naive_prune", "retrain", "finetune", "amnesiac". Defaults come from
/// `defaults`. "unsir" and "bad_teacher" are reserved and rejected.
MethodSpec parse_method(std::string_view text, const SsdParams& defaults);

enum class OutputFormat : std::uint8_t { csv, json };
OutputFormat parse_format(std::string_view text);

struct GridSpec {
  std::vector<double> alphas{3.0, 3.5, 4.0, 4.5};
  std::vector<double> lambdas{0.1, 0.5, 1.0};
  double retain_tolerance = 3.0;  // percentage points
};

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<std::size_t> hidden{64, 32};
  std::uint64_t model_seed = 1;
  std::optional<std::filesystem::path> model_checkpoint;  // load instead of training
  TrainConfig train;
  ForgetSpec forget = ForgetSpec::full_class(0);
  SsdParams ssd;
  FimGranularity granularity = FimGranularity::per_sample;
  std::size_t fim_batch_size = 64;
  std::optional<std::filesystem::path> fim_cache_path;
  std::size_t finetune_epochs = 5;
  std::size_t amnesiac_epochs = 2;
  std::uint64_t relabel_seed = 11;
  std::optional<double> baseline_learning_rate;  // finetune/amnesiac; defaults to train lr
  std::vector<MethodSpec> methods;
  std::uint64_t mia_seed = 3;
  std::optional<std::filesystem::path> output_path;
  OutputFormat format = OutputFormat::csv;
  GridSpec grid;

  void validate() const;
};

/// Defaults for the 5x4x50 synthetic benchmark with an MLP [16, 64, 32, 5].
ExperimentConfig default_config();

/// `[section]` headers and `key = value` lines; '#' starts a comment.
/// Keys are returned as "section.key".
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Applies "section.key" settings on top of `base`. Unknown keys throw.
ExperimentConfig apply_settings(ExperimentConfig base, const std::map<std::string, std::string>& settings);

ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Running

struct ExperimentResult {
  std::string method;
  double retain_acc = 0.0;        // % on held-out rows of retained classes/subclasses
  double forget_acc = 0.0;        // % on D_f
  double mia = 0.0;               // % of D_f flagged as members
  double retain_train_acc = 0.0;  // % on D_r
  std::optional<double> forget_test_acc;  // % on held-out rows of the forgotten class/subclass
  double wall_time_seconds = 0.0;            // method only
  double wall_time_inclusive_seconds = 0.0;  // + baseline setup and metric computation
  PassCounts passes;
  std::optional<SsdParams> ssd_params;
  std::optional<DampeningReport> dampening;
  double mia_attacker_accuracy = 0.0;

  friend bool operator==(const ExperimentResult&, const ExperimentResult&);
};

struct ExperimentReport {
  std::vector<ExperimentResult> rows;  // "baseline" first, then methods in config order
  std::vector<std::string> warnings;
  nlohmann::json config;
};

/// Data, split, and the baseline model shared by every method row.
struct PreparedExperiment {
  ExperimentConfig cfg;
  Dataset train;
  Dataset test;
  ForgetSplit split;
  Dataset test_retain;
  Dataset test_forget;  // empty for random forgetting
  ModelSpec spec;
  Model baseline;
  double setup_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Builds the datasets and trains (or loads) the baseline.
PreparedExperiment prepare(const ExperimentConfig& cfg);

/// Full-data FIM through the cache in cfg.fim_cache_path when set: a
/// matching cache is loaded with no data pass; a missing or mismatched one is
/// recomputed (one pass over D) and rewritten.
FimDiagonal full_fim(const PreparedExperiment& prep, PassMeter& meter, std::vector<std::string>& warnings);

/// Computes and persists the full-data FIM for the baseline; returns the path.
std::filesystem::path fim_cache(PreparedExperiment& prep);

/// One unlearning method applied to the baseline, evaluated.
ExperimentResult run_method(PreparedExperiment& prep, const MethodSpec& method);

/// Metrics for an arbitrary model against the prepared split.
ExperimentResult evaluate(const PreparedExperiment& prep, std::string method, const Model& model);

ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(PreparedExperiment& prep);

// ---------------------------------------------------------------------------
// Grid search

struct GridCell {
  double alpha = 0.0;
  double lambda = 0.0;
  double retain_acc = 0.0;
  double forget_acc = 0.0;
  double mia = 0.0;
  double retain_drop = 0.0;  // baseline retain_acc - retain_acc, points
  double objective = 0.0;    // |mia - mia_retrain| + max(0, retain_drop - tolerance)
  double selected_fraction = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;  // ascending by (objective, forget_acc, alpha, lambda)
  double baseline_retain_acc = 0.0;
  double baseline_forget_acc = 0.0;
  double retrain_mia = 0.0;
  double retrain_forget_acc = 0.0;
};

GridResult grid_search(PreparedExperiment& prep, const GridSpec& grid);
GridResult grid_search(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Output

inline constexpr std::string_view kCsvHeader =
    "method,retain_acc,forget_acc,mia,wall_time_s,selected_fraction,passes_full,passes_forget,passes_retain";

std::string results_csv(const std::vector<ExperimentResult>& rows);
nlohmann::json results_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Throws ConfigError (writing nothing) when there are no rows.
void emit_results(const ExperimentReport& report, const std::filesystem::path& path, OutputFormat format);

std::string grid_csv(const GridResult& grid);
nlohmann::json grid_json(const GridResult& grid);

}  // namespace unlearn::harness
