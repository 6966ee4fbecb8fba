// Copyright 2026 The ssd-unlearn Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

#include "io/binary.hpp"
#include "unlearn/error.hpp"
#include "unlearn/harness.hpp"

namespace unlearn::harness {
namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

bool same_report(const DampeningReport& a, const DampeningReport& b) {
  if (a.per_layer.size() != b.per_layer.size()) return false;
  for (std::size_t i = 0; i < a.per_layer.size(); ++i) {
    const auto& x = a.per_layer[i];
    const auto& y = b.per_layer[i];
    if (x.layer != y.layer || x.selected != y.selected || x.total != y.total) return false;
  }
  return a.selected_count == b.selected_count && a.total_params == b.total_params &&
         a.selected_fraction == b.selected_fraction && a.zeroed_count == b.zeroed_count &&
         a.clamped_count == b.clamped_count;
}

json report_to_json(const DampeningReport& r) {
  json layers = json::array();
  for (const auto& l : r.per_layer) layers.push_back({{"layer", l.layer}, {"selected", l.selected}, {"total", l.total}});
  return {{"selected_count", r.selected_count}, {"total_params", r.total_params},
          {"selected_fraction", r.selected_fraction}, {"zeroed_count", r.zeroed_count},
          {"clamped_count", r.clamped_count}, {"per_layer", layers}};
}

DampeningReport report_from(const json& j) {
  DampeningReport r;
  r.selected_count = j.at("selected_count").get<std::size_t>();
  r.total_params = j.at("total_params").get<std::size_t>();
  r.selected_fraction = j.at("selected_fraction").get<double>();
  r.zeroed_count = j.at("zeroed_count").get<std::size_t>();
  r.clamped_count = j.at("clamped_count").get<std::size_t>();
  for (const auto& l : j.at("per_layer")) {
    r.per_layer.push_back({l.at("layer").get<std::size_t>(), l.at("selected").get<std::size_t>(),
                           l.at("total").get<std::size_t>()});
  }
  return r;
}

json row_to_json(const ExperimentResult& r) {
  json j = {{"method", r.method},
            {"retain_acc", r.retain_acc},
            {"forget_acc", r.forget_acc},
            {"mia", r.mia},
            {"mia_attacker_accuracy", r.mia_attacker_accuracy},
            {"retain_train_acc", r.retain_train_acc},
            {"wall_time_seconds", r.wall_time_seconds},
            {"wall_time_inclusive_seconds", r.wall_time_inclusive_seconds},
            {"dataset_passes", {{"full", r.passes.full}, {"forget", r.passes.forget}, {"retain", r.passes.retain}}}};
  j["forget_test_acc"] = r.forget_test_acc ? json(*r.forget_test_acc) : json(nullptr);
  j["ssd_params"] = r.ssd_params ? json{{"alpha", r.ssd_params->alpha}, {"lambda", r.ssd_params->lambda}} : json(nullptr);
  j["dampening"] = r.dampening ? report_to_json(*r.dampening) : json(nullptr);
  return j;
}

ExperimentResult row_from_json(const json& j) {
  ExperimentResult r;
  r.method = j.at("method").get<std::string>();
  r.retain_acc = j.at("retain_acc").get<double>();
  r.forget_acc = j.at("forget_acc").get<double>();
  r.mia = j.at("mia").get<double>();
  r.mia_attacker_accuracy = j.at("mia_attacker_accuracy").get<double>();
  r.retain_train_acc = j.at("retain_train_acc").get<double>();
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  r.wall_time_inclusive_seconds = j.at("wall_time_inclusive_seconds").get<double>();
  const json& p = j.at("dataset_passes");
  r.passes = {p.at("full").get<std::uint64_t>(), p.at("forget").get<std::uint64_t>(),
              p.at("retain").get<std::uint64_t>()};
  if (!j.at("forget_test_acc").is_null()) r.forget_test_acc = j.at("forget_test_acc").get<double>();
  if (!j.at("ssd_params").is_null()) {
    r.ssd_params = SsdParams{j["ssd_params"].at("alpha").get<double>(), j["ssd_params"].at("lambda").get<double>()};
  }
  if (!j.at("dampening").is_null()) r.dampening = report_from(j["dampening"]);
  return r;
}

}  // namespace

bool operator==(const ExperimentResult& a, const ExperimentResult& b) {
  const bool params_equal = a.ssd_params.has_value() == b.ssd_params.has_value() &&
                            (!a.ssd_params || (a.ssd_params->alpha == b.ssd_params->alpha &&
                                               a.ssd_params->lambda == b.ssd_params->lambda));
  const bool reports_equal = a.dampening.has_value() == b.dampening.has_value() &&
                             (!a.dampening || same_report(*a.dampening, *b.dampening));
  return a.method == b.method && a.retain_acc == b.retain_acc && a.forget_acc == b.forget_acc && a.mia == b.mia &&
         a.retain_train_acc == b.retain_train_acc && a.forget_test_acc == b.forget_test_acc &&
         a.wall_time_seconds == b.wall_time_seconds &&
         a.wall_time_inclusive_seconds == b.wall_time_inclusive_seconds && a.passes == b.passes &&
         a.mia_attacker_accuracy == b.mia_attacker_accuracy && params_equal && reports_equal;
}

std::string results_csv(const std::vector<ExperimentResult>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.method;
    out += ',' + fmt("%.4f", r.retain_acc);
    out += ',' + fmt("%.4f", r.forget_acc);
    out += ',' + fmt("%.4f", r.mia);
    out += ',' + fmt("%.6f", r.wall_time_seconds);
    out += ',';
    if (r.dampening) out += fmt("%.6f", r.dampening->selected_fraction);
    out += ',' + std::to_string(r.passes.full);
    out += ',' + std::to_string(r.passes.forget);
    out += ',' + std::to_string(r.passes.retain);
    out += '\n';
  }
  return out;
}

nlohmann::json results_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(row_to_json(r));
  return {{"config", report.config}, {"warnings", report.warnings}, {"results", rows}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  try {
    report.config = j.at("config");
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& row : j.at("results")) report.rows.push_back(row_from_json(row));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed results JSON: ") + e.what());
  }
  return report;
}

void emit_results(const ExperimentReport& report, const std::filesystem::path& path, OutputFormat format) {
  if (report.rows.empty()) throw ConfigError("no results to write");
  if (format == OutputFormat::csv) {
    io::write_text(path, results_csv(report.rows));
  } else {
    io::write_text(path, results_json(report).dump(2) + "\n");
  }
}

std::string grid_csv(const GridResult& grid) {
  std::string out = "rank,alpha,lambda,objective,retain_acc,forget_acc,mia,retain_drop,selected_fraction\n";
  std::size_t rank = 1;
  for (const auto& c : grid.cells) {
    out += std::to_string(rank++);
    out += ',' + fmt("%g", c.alpha);
    out += ',' + fmt("%g", c.lambda);
    out += ',' + fmt("%.4f", c.objective);
    out += ',' + fmt("%.4f", c.retain_acc);
    out += ',' + fmt("%.4f", c.forget_acc);
    out += ',' + fmt("%.4f", c.mia);
    out += ',' + fmt("%.4f", c.retain_drop);
    out += ',' + fmt("%.6f", c.selected_fraction);
    out += '\n';
  }
  return out;
}

nlohmann::json grid_json(const GridResult& grid) {
  json cells = json::array();
  for (const auto& c : grid.cells) {
    cells.push_back({{"alpha", c.alpha}, {"lambda", c.lambda}, {"objective", c.objective},
                     {"retain_acc", c.retain_acc}, {"forget_acc", c.forget_acc}, {"mia", c.mia},
                     {"retain_drop", c.retain_drop}, {"selected_fraction", c.selected_fraction}});
  }
  return {{"objective", "|mia - mia_retrain| + max(0, retain_drop - retain_tolerance), ties by forget_acc; "
                        "an ad hoc ranking rule for this tool"},
          {"baseline_retain_acc", grid.baseline_retain_acc},
          {"baseline_forget_acc", grid.baseline_forget_acc},
          {"retrain_mia", grid.retrain_mia},
          {"retrain_forget_acc", grid.retrain_forget_acc},
          {"cells", cells}};
}

}  // namespace unlearn::harness
