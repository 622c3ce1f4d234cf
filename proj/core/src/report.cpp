#include "semicyclic/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "semicyclic/error.hpp"

namespace semicyclic {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double value) { return fmt::format("{}", value); }

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, fmt::format("cannot open '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::error_code ec;
  const fs::path p(path);
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw Error(ErrorCategory::kIo, fmt::format("cannot create directory '{}': {}", p.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, fmt::format("cannot open '{}' for writing", path));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCategory::kIo, fmt::format("write to '{}' failed", path));
}

namespace {

Artifact emit(const std::string& out_dir, const std::string& name, const std::string& content) {
  write_file((fs::path(out_dir) / name).string(), content);
  return {name, fnv1a(content)};
}

}  // namespace

std::string write_manifest(const std::string& out_dir, std::string_view command, std::uint64_t seed,
                           std::string_view config_json, const std::vector<Artifact>& artifacts,
                           std::string_view extra_json) {
  json m;
  m["manifest_version"] = 1;
  m["tool"] = "semicyclic";
  m["version"] = std::string(kVersion);
  m["command"] = std::string(command);
  m["seed"] = seed;
  m["config"] = json::parse(config_json);
  m["config_hash"] = hex64(fnv1a(m["config"].dump()));
  json outputs = json::object();
  for (const auto& a : artifacts) outputs[a.name] = hex64(a.hash);
  m["outputs"] = outputs;
  m["details"] = json::parse(extra_json);
  const std::string path = (fs::path(out_dir) / "manifest.json").string();
  write_file(path, m.dump(2) + "\n");
  return path;
}

EmitResult emit_report(const EvaluationReport& report, const std::string& out_dir) {
  const auto& c = report.config;
  std::string per_day = "strategy,day,repetition,component,metric\n";
  std::string matrices = "strategy,day,repetition,block,component,accuracy\n";
  for (std::size_t s = 0; s < c.strategies.size(); ++s) {
    const std::string name(to_string(c.strategies[s]));
    const ScoreRule rule = score_rule(c.strategies[s]);
    for (const auto& rep : report.repetitions) {
      if (!rep.ok) continue;
      const StrategyRun& run = rep.runs[s];
      for (std::size_t k = 0; k < run.days.size(); ++k) {
        const Matrix& a = run.days[k];
        const auto scores = component_scores(a, rule);
        for (std::size_t j = 0; j < scores.size(); ++j) {
          per_day += fmt::format("{},{},{},{},{}\n", name, k + 1, rep.repetition, j + 1, format_double(scores[j]));
        }
        per_day += fmt::format("{},{},{},all,{}\n", name, k + 1, rep.repetition, format_double(run.day_scores[k]));
        for (std::size_t i = 0; i < a.size(); ++i) {
          for (std::size_t j = 0; j < a[i].size(); ++j) {
            matrices += fmt::format("{},{},{},{},{},{}\n", name, k + 1, rep.repetition, i + 1, j + 1,
                                    format_double(a[i][j]));
          }
        }
      }
    }
  }
  std::string aggregate = "strategy,day,mean,stddev,repetitions\n";
  for (std::size_t s = 0; s < c.strategies.size(); ++s) {
    for (std::size_t k = 0; k < report.aggregate[s].size(); ++k) {
      const DayStat& d = report.aggregate[s][k];
      aggregate += fmt::format("{},{},{},{},{}\n", to_string(c.strategies[s]), k + 1, format_double(d.mean),
                               format_double(d.stddev), d.count);
    }
  }

  EmitResult result;
  result.artifacts.push_back(emit(out_dir, "per_day.csv", per_day));
  result.artifacts.push_back(emit(out_dir, "aggregate.csv", aggregate));
  result.artifacts.push_back(emit(out_dir, "matrices.csv", matrices));

  json details;
  json reps = json::array();
  for (const auto& rep : report.repetitions) {
    json r{{"repetition", rep.repetition}, {"ok", rep.ok}};
    if (rep.ok) {
      r["cyclic_stream_hash"] = hex64(rep.cyclic_stream_hash);
      r["iid_stream_hash"] = hex64(rep.iid_stream_hash);
      json steps = json::object();
      json warnings = json::array();
      for (const auto& run : rep.runs) {
        steps[std::string(to_string(run.strategy))] = run.step_size;
        for (const auto& w : run.warnings) warnings.push_back(w);
      }
      r["step_sizes"] = steps;
      if (!warnings.empty()) r["warnings"] = warnings;
    } else {
      r["error"] = rep.error;
    }
    reps.push_back(r);
  }
  details["repetitions"] = reps;
  details["realized_train_positive_rates"] = report.realized_train_rates;
  details["realized_test_positive_rates"] = report.realized_test_rates;
  result.manifest_path =
      write_manifest(out_dir, "simulate", c.seed, config_to_json(c), result.artifacts, details.dump());
  return result;
}

EmitResult emit_grid(const GridResult& grid, const ExperimentConfig& config, const std::string& out_dir) {
  std::string csv = "strategy,step_size,final_mean,final_stddev,selected\n";
  for (const auto& e : grid.table) {
    csv += fmt::format("{},{},{},{},{}\n", to_string(e.strategy), format_double(e.step_size),
                       format_double(e.final_mean), format_double(e.final_stddev), e.selected ? 1 : 0);
  }
  EmitResult result;
  result.artifacts.push_back(emit(out_dir, "grid.csv", csv));
  json details{{"best", grid.best}};
  result.manifest_path = write_manifest(out_dir, "grid", config.seed, config_to_json(resolve(config)),
                                        result.artifacts, details.dump());
  return result;
}

std::string stall_report_json(const StallReport& r) {
  json j;
  j["variant"] = std::string(to_string(r.config.variant));
  j["norm_bound"] = r.config.norm_bound;
  j["cycles"] = r.config.cycles;
  j["blocks"] = r.config.blocks;
  j["block_size"] = r.config.block_size;
  j["dimension"] = r.config.resolved_dimension();
  j["scale"] = r.scale;
  j["a"] = r.a;
  j["gamma"] = r.gamma;
  j["full_optimum"] = r.full_optimum;
  j["full_optimum_second_start"] = r.full_optimum_check;
  j["full_gradient_mapping"] = r.full_gradient_mapping;
  j["restricted_optimum"] = r.restricted_optimum;
  j["restricted_optimum_second_start"] = r.restricted_optimum_check;
  j["restricted_gradient_mapping"] = r.restricted_gradient_mapping;
  j["restricted_gap"] = r.restricted_gap;
  j["gap_constant"] = r.gap_constant;
  j["gap_check_passed"] = r.gap_check_passed;
  j["excess_last"] = r.excess_last;
  j["excess_average"] = r.excess_average;
  j["max_span_leak"] = r.max_span_leak;
  j["iid_excess_last"] = r.iid_excess_last;
  j["iid_excess_average"] = r.iid_excess_average;
  j["iid_mean_excess_last"] = r.iid_mean_excess_last;
  j["iid_mean_excess_average"] = r.iid_mean_excess_average;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

EmitResult emit_stall_report(const StallReport& r, std::uint64_t seed, const std::string& out_dir) {
  std::string span = "cycle,direction,coefficient,max_beyond_frontier\n";
  for (const auto& snap : r.span_profile) {
    for (std::size_t d = 0; d < snap.coefficients.size(); ++d) {
      span += fmt::format("{},{},{},{}\n", snap.cycle, d + 1, format_double(snap.coefficients[d]),
                          format_double(snap.max_beyond_frontier));
    }
  }
  EmitResult result;
  result.artifacts.push_back(emit(out_dir, "stall.json", stall_report_json(r)));
  result.artifacts.push_back(emit(out_dir, "span.csv", span));
  json config{{"variant", std::string(to_string(r.config.variant))},
              {"norm_bound", r.config.norm_bound},
              {"cycles", r.config.cycles},
              {"blocks", r.config.blocks},
              {"block_size", r.config.block_size}};
  result.manifest_path = write_manifest(out_dir, "hardcase", seed, config.dump(), result.artifacts);
  return result;
}

}  // namespace semicyclic
