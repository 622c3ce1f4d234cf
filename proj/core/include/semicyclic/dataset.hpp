#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace semicyclic {

/// One labelled example. `values` may be empty, meaning every listed index
/// has value 1 (term presence).
struct Example {
  std::vector<std::uint32_t> indices;  // sorted, < feature count
  std::vector<double> values;
  int label = 1;                       // +1 / -1
  int component = 0;                   // 0-based
};

struct Dataset {
  int features = 0;  // vocabulary size, excluding any bias coordinate
  int components = 0;
  std::vector<Example> train;
  std::vector<Example> test;
  std::vector<std::string> vocabulary;  // optional; index -> token

  void validate() const;
  /// Examples of the split belonging to `component`.
  std::vector<const Example*> select(std::span<const Example> split, int component) const;
};

/// Fraction of positive labels among `split` examples of `component`; NaN if none.
double positive_rate(std::span<const Example> split, int component);
std::vector<long> component_counts(std::span<const Example> split, int components);

/// Canonical text dump: a header, then one line per example,
///   <component (1-based)> <label> <sorted indices...>
/// Only presence-valued datasets can be dumped.
void write_dump(const Dataset& data, std::ostream& out);
Dataset read_dump(std::istream& in);
void write_dump_file(const Dataset& data, const std::string& path);
Dataset read_dump_file(const std::string& path);

/// FNV-1a, used for stream and artifact fingerprints.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a_u64(std::uint64_t value, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace semicyclic
