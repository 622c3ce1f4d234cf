#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "semicyclic/experiment.hpp"
#include "semicyclic/hard_instance.hpp"

namespace semicyclic {

inline constexpr std::string_view kVersion = "0.1.0";

struct Artifact {
  std::string name;  // file name inside the output directory
  std::uint64_t hash = 0;
};

struct EmitResult {
  std::vector<Artifact> artifacts;
  std::string manifest_path;
};

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);
/// Shortest round-trip decimal form.
std::string format_double(double value);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
/// Creates parent directories; errors carry the path.
void write_file(const std::string& path, std::string_view content);

/// manifest.json: tool version, command, seed, canonical config and its
/// hash, and the FNV-1a hash of every artifact. `extra_json` (an object,
/// possibly empty) is merged in under "details".
std::string write_manifest(const std::string& out_dir, std::string_view command, std::uint64_t seed,
                           std::string_view config_json, const std::vector<Artifact>& artifacts,
                           std::string_view extra_json = "{}");

/// per_day.csv   strategy,day,repetition,component,metric  (component "all" = day score)
/// aggregate.csv strategy,day,mean,stddev,repetitions
/// matrices.csv  strategy,day,repetition,block,component,accuracy
/// plus manifest.json.
EmitResult emit_report(const EvaluationReport& report, const std::string& out_dir);

/// grid.csv strategy,step_size,final_mean,final_stddev,selected, plus manifest.json.
EmitResult emit_grid(const GridResult& grid, const ExperimentConfig& config, const std::string& out_dir);

/// stall.json (all scalars and checks) and span.csv
/// (cycle,direction,coefficient), plus manifest.json.
EmitResult emit_stall_report(const StallReport& report, std::uint64_t seed, const std::string& out_dir);
std::string stall_report_json(const StallReport& report);

}  // namespace semicyclic
