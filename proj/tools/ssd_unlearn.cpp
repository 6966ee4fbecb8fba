// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

// ssd-unlearn: train a baseline, cache its Fisher diagonal, and run
// unlearning methods on it.
//
//   ssd-unlearn train   --out model.ssdc
//   ssd-unlearn fim     --model model.ssdc --fim-cache full.ssdf
//   ssd-unlearn unlearn --method ssd --alpha 10 --lambda 1 --forget class:0
//   ssd-unlearn bench   --config bench.cfg --out results.csv
//   ssd-unlearn grid    --forget subclass:1:2 --format json

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "unlearn/checkpoint.hpp"
#include "unlearn/error.hpp"
#include "unlearn/harness.hpp"
#include "unlearn/simd/kernels.hpp"

namespace {

using namespace unlearn;
using namespace unlearn::harness;

struct Flags {
  std::string config;
  std::optional<double> alpha, lambda;
  std::string method;
  std::string forget;
  std::string fim_cache;
  std::string out;
  std::string format;
  std::string granularity;
  std::string model;
  std::string alphas, lambdas;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "key = value config file with [section] headers");
  cmd->add_option("--forget", f.forget, "class:K | subclass:K:S | random:N:SEED");
  cmd->add_option("--granularity", f.granularity, "per_sample | per_batch");
  cmd->add_option("--fim-cache", f.fim_cache, "full-data Fisher cache file");
  cmd->add_option("--model", f.model, "baseline checkpoint to load instead of training");
  cmd->add_option("--seed", f.seed, "model init and shuffle seed");
  cmd->add_option("--out", f.out, "output file (stdout when omitted)");
  cmd->add_option("--format", f.format, "csv | json");
  cmd->add_option("--alpha", f.alpha, "SSD selection threshold");
  cmd->add_option("--lambda", f.lambda, "SSD dampening constant");
}

ExperimentConfig build_config(const Flags& f, bool single_method) {
  std::map<std::string, std::string> settings;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot open config " + f.config);
    std::stringstream buf;
    buf << in.rdbuf();
    settings = parse_config_text(buf.str());
  }
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) settings[key] = v;
  };
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  set("forget.spec", f.forget);
  set("fim.granularity", f.granularity);
  set("fim.cache", f.fim_cache);
  set("model.checkpoint", f.model);
  set("experiment.format", f.format);
  set("grid.alphas", f.alphas);
  set("grid.lambdas", f.lambdas);
  if (f.alpha) settings["ssd.alpha"] = num(*f.alpha);
  if (f.lambda) settings["ssd.lambda"] = num(*f.lambda);
  if (f.seed) {
    settings["model.seed"] = std::to_string(*f.seed);
    settings["train.shuffle_seed"] = std::to_string(*f.seed);
  }
  if (single_method) settings["experiment.methods"] = f.method.empty() ? "ssd" : f.method;
  if (!f.out.empty()) settings["experiment.output"] = f.out;
  return apply_settings(default_config(), settings);
}

void write_output(const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (path) {
    std::ofstream out(*path, std::ios::binary | std::ios::trunc);
    if (!(out << text)) throw IoError("cannot write " + path->string());
  } else {
    std::cout << text;
  }
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_train(const Flags& f) {
  if (f.out.empty()) throw ConfigError("train needs --out for the checkpoint");
  ExperimentConfig cfg = build_config(f, false);
  cfg.model_checkpoint.reset();
  PreparedExperiment prep = prepare(cfg);
  save_checkpoint(prep.baseline, f.out);
  std::printf("trained %zu parameters in %.3f s, test accuracy %.2f%%, wrote %s\n", prep.baseline.params.size(),
              prep.setup_seconds, 100.0 * accuracy(prep.baseline, prep.test), f.out.c_str());
  return 0;
}

int cmd_fim(const Flags& f) {
  ExperimentConfig cfg = build_config(f, false);
  if (!cfg.fim_cache_path) throw ConfigError("fim needs --fim-cache");
  PreparedExperiment prep = prepare(cfg);
  const auto path = fim_cache(prep);
  std::printf("wrote %s (%zu values, %s)\n", path.c_str(), prep.baseline.params.size(), to_string(cfg.granularity));
  return 0;
}

int cmd_run(const Flags& f, bool single_method) {
  const ExperimentConfig cfg = build_config(f, single_method);
  PreparedExperiment prep = prepare(cfg);
  const ExperimentReport report = run_experiment(prep);
  warn_all(report.warnings);
  if (cfg.output_path) {
    emit_results(report, *cfg.output_path, cfg.format);
  } else if (cfg.format == OutputFormat::csv) {
    std::cout << results_csv(report.rows);
  } else {
    std::cout << results_json(report).dump(2) << "\n";
  }
  return 0;
}

int cmd_grid(const Flags& f) {
  const ExperimentConfig cfg = build_config(f, false);
  PreparedExperiment prep = prepare(cfg);
  const GridResult grid = grid_search(prep, cfg.grid);
  warn_all(prep.warnings);
  const std::string text = cfg.format == OutputFormat::csv ? grid_csv(grid) : grid_json(grid).dump(2) + "\n";
  write_output(cfg.output_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective Synaptic Dampening and baseline unlearning methods"};
  app.require_subcommand(1);
  std::string simd;
  app.add_option("--simd", simd, "force a kernel backend: scalar | avx2 | neon");

  Flags f;
  auto* train_cmd = app.add_subcommand("train", "train the baseline model and save a checkpoint");
  auto* fim_cmd = app.add_subcommand("fim", "compute and cache the full-data Fisher diagonal");
  auto* unlearn_cmd = app.add_subcommand("unlearn", "run one unlearning method");
  auto* bench_cmd = app.add_subcommand("bench", "run every configured method");
  auto* grid_cmd = app.add_subcommand("grid", "grid search over (alpha, lambda)");
  for (auto* cmd : {train_cmd, fim_cmd, unlearn_cmd, bench_cmd, grid_cmd}) add_common(cmd, f);
  unlearn_cmd->add_option("--method", f.method,
                          "ssd[:A:L] | naive_prune | select_prune[:A] | retrain | finetune | amnesiac");
  grid_cmd->add_option("--alphas", f.alphas, "comma-separated alpha values");
  grid_cmd->add_option("--lambdas", f.lambdas, "comma-separated lambda values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!simd.empty()) {
      if (simd == "scalar") simd::set_active_backend(simd::Backend::scalar);
      else if (simd == "avx2") simd::set_active_backend(simd::Backend::avx2);
      else if (simd == "neon") simd::set_active_backend(simd::Backend::neon);
      else throw ConfigError("unknown --simd backend '" + simd + "'");
    }
    if (*train_cmd) return cmd_train(f);
    if (*fim_cmd) return cmd_fim(f);
    if (*unlearn_cmd) return cmd_run(f, true);
    if (*bench_cmd) return cmd_run(f, false);
    if (*grid_cmd) return cmd_grid(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
