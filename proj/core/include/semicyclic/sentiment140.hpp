#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semicyclic/dataset.hpp"
#include "semicyclic/synthetic_tasks.hpp"

namespace semicyclic {

struct IngestOptions {
  int vocabulary = 1024;
  double test_fraction = 0.1;
  std::uint64_t split_seed = 0;
  std::optional<SkewSpec> skew;  // label-drop re-skew, applied to both splits
  int components = 6;            // 24 / components hours per block
  bool equalize_components = true;  // trim training components to the smallest
  double max_skip_rate = 0.01;
};

struct IngestReport {
  long rows = 0;
  long malformed = 0;
  long bad_dates = 0;
  long kept = 0;
  double skip_rate = 0.0;
  long dropped_for_skew = 0;
  long trimmed_for_balance = 0;
  std::vector<long> train_counts;
  std::vector<long> test_counts;
  std::vector<double> train_positive_rates;
};

struct IngestResult {
  Dataset data;
  IngestReport report;
};

/// Splits one CSV line into fields; doubled quotes inside quoted fields are
/// unescaped. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);
/// Hour of day from "Mon Apr 06 22:19:45 PDT 2009"; clock time as written.
std::optional<int> parse_hour(std::string_view date);
/// Lowercase ASCII alphanumeric runs; every other byte separates tokens.
std::vector<std::string> tokenize(std::string_view text);

IngestResult ingest_sentiment140(std::istream& in, const IngestOptions& options);
IngestResult ingest_sentiment140(const std::string& path, const IngestOptions& options);

}  // namespace semicyclic
