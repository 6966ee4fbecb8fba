// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "unlearn/error.hpp"
#include "unlearn/harness.hpp"

namespace unlearn::harness {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view text, std::string_view key) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const auto item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view key) {
  std::vector<T> out;
  for (auto item : split_list(text)) out.push_back(parse_value<T>(item, key));
  if (out.empty()) throw ConfigError(std::string(key) + " must not be empty");
  return out;
}

}  // namespace

MethodSpec parse_method(std::string_view text, const SsdParams& defaults) {
  text = trim(text);
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  const std::string_view head = parts[0];
  MethodSpec m;
  m.ssd = defaults;
  m.name = std::string(head);
  if (head == "ssd") {
    m.kind = MethodKind::ssd;
    if (parts.size() == 3) {
      m.ssd.alpha = parse_value<double>(parts[1], "ssd alpha");
      m.ssd.lambda = parse_value<double>(parts[2], "ssd lambda");
      m.name = std::string(text);
    } else if (parts.size() != 1) {
      throw ConfigError("ssd method takes the form ssd or ssd:ALPHA:LAMBDA");
    }
  } else if (head == "select_prune") {
    m.kind = MethodKind::select_prune;
    if (parts.size() == 2) {
      m.ssd.alpha = parse_value<double>(parts[1], "select_prune alpha");
      m.name = std::string(text);
    } else if (parts.size() != 1) {
      throw ConfigError("select_prune method takes the form select_prune or select_prune:ALPHA");
    }
  } else if (parts.size() == 1 && head == "naive_prune") {
    m.kind = MethodKind::naive_prune;
  } else if (parts.size() == 1 && head == "retrain") {
    m.kind = MethodKind::retrain;
  } else if (parts.size() == 1 && head == "finetune") {
    m.kind = MethodKind::finetune;
  } else if (parts.size() == 1 && head == "amnesiac") {
    m.kind = MethodKind::amnesiac;
  } else if (head == "unsir" || head == "bad_teacher") {
    throw ConfigError("method '" + std::string(head) + "' is reserved but not implemented");
  } else {
    throw ConfigError("unknown method '" + std::string(text) + "'");
  }
  m.ssd.validate();
  return m;
}

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ConfigError("format must be csv or json, got '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (dataset.kind == DatasetSource::Kind::synthetic) dataset.synthetic.validate();
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("hidden layer widths must be >= 1");
  }
  train.validate();
  ssd.validate();
  if (fim_batch_size == 0) throw ConfigError("fim batch_size must be positive");
  if (finetune_epochs == 0 || amnesiac_epochs == 0) throw ConfigError("baseline epochs must be >= 1");
  if (baseline_learning_rate && !(*baseline_learning_rate >= 0.0)) {
    throw ConfigError("baselines learning_rate must be non-negative");
  }
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (grid.alphas.empty() || grid.lambdas.empty()) throw ConfigError("grid alphas and lambdas must be nonempty");
  for (double a : grid.alphas) SsdParams{a, 1.0}.validate();
  for (double l : grid.lambdas) SsdParams{1.0, l}.validate();
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.train.epochs = 60;
  cfg.train.batch_size = 32;
  cfg.train.learning_rate = 1e-3;
  cfg.train.shuffle_seed = 5;
  // A class holding 1/5 of the data caps F_f / F at 5, so alpha must sit
  // below that to select anything.
  cfg.ssd.alpha = 3.0;
  cfg.ssd.lambda = 0.1;
  for (const char* name : {"ssd", "naive_prune", "select_prune", "retrain", "finetune", "amnesiac"}) {
    cfg.methods.push_back(parse_method(name, cfg.ssd));
  }
  return cfg;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out[section.empty() ? std::string(key) : section + "." + std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

ExperimentConfig apply_settings(ExperimentConfig cfg, const std::map<std::string, std::string>& settings) {
  using Setter = std::function<void(const std::string&, std::string_view)>;
  auto& syn = cfg.dataset.synthetic;
  const std::map<std::string, Setter> setters = {
      {"dataset.kind",
       [&](const std::string& k, std::string_view v) {
         if (v == "synthetic") cfg.dataset.kind = DatasetSource::Kind::synthetic;
         else if (v == "idx") cfg.dataset.kind = DatasetSource::Kind::idx;
         else throw ConfigError(k + " must be synthetic or idx");
       }},
      {"dataset.superclasses", [&](auto& k, auto v) { syn.superclasses = parse_value<std::size_t>(v, k); }},
      {"dataset.subclasses_per_super", [&](auto& k, auto v) { syn.subclasses_per_super = parse_value<std::size_t>(v, k); }},
      {"dataset.samples_per_subclass", [&](auto& k, auto v) { syn.samples_per_subclass = parse_value<std::size_t>(v, k); }},
      {"dataset.dim", [&](auto& k, auto v) { syn.dim = parse_value<std::size_t>(v, k); }},
      {"dataset.cluster_spread", [&](auto& k, auto v) { syn.cluster_spread = parse_value<double>(v, k); }},
      {"dataset.super_separation", [&](auto& k, auto v) { syn.super_separation = parse_value<double>(v, k); }},
      {"dataset.sub_separation", [&](auto& k, auto v) { syn.sub_separation = parse_value<double>(v, k); }},
      {"dataset.seed", [&](auto& k, auto v) { syn.seed = parse_value<std::uint64_t>(v, k); }},
      {"dataset.train_images", [&](auto&, auto v) { cfg.dataset.train_images = std::string(v); }},
      {"dataset.train_labels", [&](auto&, auto v) { cfg.dataset.train_labels = std::string(v); }},
      {"dataset.test_images", [&](auto&, auto v) { cfg.dataset.test_images = std::string(v); }},
      {"dataset.test_labels", [&](auto&, auto v) { cfg.dataset.test_labels = std::string(v); }},
      {"model.hidden",
       [&](auto& k, auto v) {
         cfg.hidden.clear();
         for (auto item : split_list(v)) cfg.hidden.push_back(parse_value<std::size_t>(item, k));
       }},
      {"model.seed", [&](auto& k, auto v) { cfg.model_seed = parse_value<std::uint64_t>(v, k); }},
      {"model.checkpoint", [&](auto&, auto v) { cfg.model_checkpoint = std::string(v); }},
      {"train.epochs", [&](auto& k, auto v) { cfg.train.epochs = parse_value<std::size_t>(v, k); }},
      {"train.batch_size", [&](auto& k, auto v) { cfg.train.batch_size = parse_value<std::size_t>(v, k); }},
      {"train.learning_rate", [&](auto& k, auto v) { cfg.train.learning_rate = parse_value<double>(v, k); }},
      {"train.adam_beta1", [&](auto& k, auto v) { cfg.train.adam_beta1 = parse_value<double>(v, k); }},
      {"train.adam_beta2", [&](auto& k, auto v) { cfg.train.adam_beta2 = parse_value<double>(v, k); }},
      {"train.adam_eps", [&](auto& k, auto v) { cfg.train.adam_eps = parse_value<double>(v, k); }},
      {"train.shuffle_seed", [&](auto& k, auto v) { cfg.train.shuffle_seed = parse_value<std::uint64_t>(v, k); }},
      {"forget.spec", [&](auto&, auto v) { cfg.forget = parse_forget_spec(v); }},
      {"fim.granularity", [&](auto&, auto v) { cfg.granularity = parse_granularity(v); }},
      {"fim.batch_size", [&](auto& k, auto v) { cfg.fim_batch_size = parse_value<std::size_t>(v, k); }},
      {"fim.cache", [&](auto&, auto v) { cfg.fim_cache_path = std::string(v); }},
      {"ssd.alpha", [&](auto& k, auto v) { cfg.ssd.alpha = parse_value<double>(v, k); }},
      {"ssd.lambda", [&](auto& k, auto v) { cfg.ssd.lambda = parse_value<double>(v, k); }},
      {"baselines.finetune_epochs", [&](auto& k, auto v) { cfg.finetune_epochs = parse_value<std::size_t>(v, k); }},
      {"baselines.amnesiac_epochs", [&](auto& k, auto v) { cfg.amnesiac_epochs = parse_value<std::size_t>(v, k); }},
      {"baselines.relabel_seed", [&](auto& k, auto v) { cfg.relabel_seed = parse_value<std::uint64_t>(v, k); }},
      {"baselines.learning_rate", [&](auto& k, auto v) { cfg.baseline_learning_rate = parse_value<double>(v, k); }},
      {"experiment.methods",
       [&](auto&, auto v) {
         cfg.methods.clear();
         for (auto item : split_list(v)) cfg.methods.push_back(MethodSpec{MethodKind::ssd, {}, std::string(item)});
       }},
      {"experiment.mia_seed", [&](auto& k, auto v) { cfg.mia_seed = parse_value<std::uint64_t>(v, k); }},
      {"experiment.output", [&](auto&, auto v) { cfg.output_path = std::string(v); }},
      {"experiment.format", [&](auto&, auto v) { cfg.format = parse_format(v); }},
      {"grid.alphas", [&](auto& k, auto v) { cfg.grid.alphas = parse_list<double>(v, k); }},
      {"grid.lambdas", [&](auto& k, auto v) { cfg.grid.lambdas = parse_list<double>(v, k); }},
      {"grid.retain_tolerance", [&](auto& k, auto v) { cfg.grid.retain_tolerance = parse_value<double>(v, k); }},
  };

  for (const auto& [key, value] : settings) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  // Method defaults depend on [ssd], so resolve names after every key is in.
  std::vector<MethodSpec> resolved;
  for (const MethodSpec& m : cfg.methods) resolved.push_back(parse_method(m.name, cfg.ssd));
  cfg.methods = std::move(resolved);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return apply_settings(default_config(), parse_config_text(buf.str()));
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  const auto& syn = cfg.dataset.synthetic;
  if (cfg.dataset.kind == DatasetSource::Kind::synthetic) {
    j["dataset"] = {{"kind", "synthetic"},
                    {"superclasses", syn.superclasses},
                    {"subclasses_per_super", syn.subclasses_per_super},
                    {"samples_per_subclass", syn.samples_per_subclass},
                    {"dim", syn.dim},
                    {"cluster_spread", syn.cluster_spread},
                    {"super_separation", syn.super_separation},
                    {"sub_separation", syn.sub_separation},
                    {"seed", syn.seed}};
  } else {
    j["dataset"] = {{"kind", "idx"},
                    {"train_images", cfg.dataset.train_images.string()},
                    {"train_labels", cfg.dataset.train_labels.string()},
                    {"test_images", cfg.dataset.test_images.string()},
                    {"test_labels", cfg.dataset.test_labels.string()}};
  }
  j["model"] = {{"hidden", cfg.hidden}, {"seed", cfg.model_seed}, {"activation", "relu"}};
  if (cfg.model_checkpoint) j["model"]["checkpoint"] = cfg.model_checkpoint->string();
  j["train"] = {{"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"learning_rate", cfg.train.learning_rate},
                {"adam_beta1", cfg.train.adam_beta1},
                {"adam_beta2", cfg.train.adam_beta2},
                {"adam_eps", cfg.train.adam_eps},
                {"shuffle_seed", cfg.train.shuffle_seed}};
  j["forget"] = to_string(cfg.forget);
  j["fim"] = {{"granularity", to_string(cfg.granularity)},
              {"batch_size", cfg.fim_batch_size},
              {"fisher", "empirical, true labels, mean-normalized"}};
  if (cfg.fim_cache_path) j["fim"]["cache"] = cfg.fim_cache_path->string();
  j["ssd"] = {{"alpha", cfg.ssd.alpha}, {"lambda", cfg.ssd.lambda}};
  j["baselines"] = {{"finetune_epochs", cfg.finetune_epochs},
                    {"amnesiac_epochs", cfg.amnesiac_epochs},
                    {"relabel_seed", cfg.relabel_seed},
                    {"learning_rate", cfg.baseline_learning_rate.value_or(cfg.train.learning_rate)}};
  std::vector<std::string> names;
  for (const auto& m : cfg.methods) names.push_back(m.name);
  j["methods"] = names;
  j["mia"] = {{"seed", cfg.mia_seed},
              {"feature", "per-sample loss"},
              {"member_pool", "subsample of D_r, size min(|test|, |D_r|)"},
              {"nonmember_pool", "test set"},
              {"attacker", "logistic regression, 500 full-batch GD iterations, lr 0.1, standardized feature"}};
  j["grid"] = {{"alphas", cfg.grid.alphas},
               {"lambdas", cfg.grid.lambdas},
               {"retain_tolerance", cfg.grid.retain_tolerance},
               {"objective", "|mia - mia_retrain| + max(0, retain_drop - retain_tolerance), ties by forget_acc"}};
  return j;
}

}  // namespace unlearn::harness
