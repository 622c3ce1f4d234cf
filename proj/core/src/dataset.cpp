#include "semicyclic/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

namespace {

void check_example(const Example& e, int features, int components, std::string_view where) {
  if (e.label != 1 && e.label != -1) {
    throw_argument(fmt::format("{}: label must be +1 or -1, got {}", where, e.label));
  }
  if (e.component < 0 || e.component >= components) {
    throw_argument(fmt::format("{}: component {} outside 1..{}", where, e.component + 1, components));
  }
  if (!e.values.empty() && e.values.size() != e.indices.size()) {
    throw_argument(fmt::format("{}: {} values for {} indices", where, e.values.size(), e.indices.size()));
  }
  for (std::size_t k = 0; k < e.indices.size(); ++k) {
    if (e.indices[k] >= static_cast<std::uint32_t>(features)) {
      throw_argument(fmt::format("{}: feature index {} >= {}", where, e.indices[k], features));
    }
    if (k > 0 && e.indices[k] <= e.indices[k - 1]) {
      throw_argument(fmt::format("{}: feature indices not strictly increasing", where));
    }
  }
}

}  // namespace

void Dataset::validate() const {
  if (features < 1 || components < 1) throw_argument("dataset needs features >= 1 and components >= 1");
  for (const auto& e : train) check_example(e, features, components, "train");
  for (const auto& e : test) check_example(e, features, components, "test");
}

std::vector<const Example*> Dataset::select(std::span<const Example> split, int component) const {
  std::vector<const Example*> out;
  for (const auto& e : split) {
    if (e.component == component) out.push_back(&e);
  }
  return out;
}

double positive_rate(std::span<const Example> split, int component) {
  long pos = 0, total = 0;
  for (const auto& e : split) {
    if (e.component != component) continue;
    ++total;
    pos += e.label > 0 ? 1 : 0;
  }
  return total == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(pos) / static_cast<double>(total);
}

std::vector<long> component_counts(std::span<const Example> split, int components) {
  std::vector<long> counts(static_cast<std::size_t>(components), 0);
  for (const auto& e : split) {
    if (e.component >= 0 && e.component < components) ++counts[static_cast<std::size_t>(e.component)];
  }
  return counts;
}

void write_dump(const Dataset& data, std::ostream& out) {
  data.validate();
  out << "# semicyclic-dataset v1\n";
  out << "features " << data.features << "\n";
  out << "components " << data.components << "\n";
  if (!data.vocabulary.empty()) {
    out << "vocabulary";
    for (const auto& token : data.vocabulary) out << ' ' << token;
    out << "\n";
  }
  const auto emit = [&](std::string_view name, const std::vector<Example>& split) {
    out << "split " << name << ' ' << split.size() << "\n";
    for (const auto& e : split) {
      if (!e.values.empty()) throw_argument("dump format stores presence features only");
      out << e.component + 1 << ' ' << e.label;
      for (auto idx : e.indices) out << ' ' << idx;
      out << '\n';
    }
  };
  emit("train", data.train);
  emit("test", data.test);
}

Dataset read_dump(std::istream& in) {
  Dataset data;
  std::string line;
  std::vector<Example>* split = nullptr;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (std::isdigit(static_cast<unsigned char>(line[0]))) {
      if (split == nullptr) throw Error(ErrorCategory::kIngestion, fmt::format("dump line {}: record before split header", line_no));
      Example e;
      long comp = 0;
      if (!(ls >> comp >> e.label)) {
        throw Error(ErrorCategory::kIngestion, fmt::format("dump line {}: malformed record", line_no));
      }
      e.component = static_cast<int>(comp - 1);
      std::uint32_t idx = 0;
      while (ls >> idx) e.indices.push_back(idx);
      split->push_back(std::move(e));
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "features") {
      ls >> data.features;
    } else if (key == "components") {
      ls >> data.components;
    } else if (key == "vocabulary") {
      std::string token;
      while (ls >> token) data.vocabulary.push_back(token);
    } else if (key == "split") {
      std::string name;
      ls >> name;
      if (name == "train") {
        split = &data.train;
      } else if (name == "test") {
        split = &data.test;
      } else {
        throw Error(ErrorCategory::kIngestion, fmt::format("dump line {}: unknown split '{}'", line_no, name));
      }
    } else {
      throw Error(ErrorCategory::kIngestion, fmt::format("dump line {}: unknown key '{}'", line_no, key));
    }
  }
  try {
    data.validate();
  } catch (const Error& e) {
    throw Error(ErrorCategory::kIngestion, fmt::format("invalid dump: {}", e.what()));
  }
  return data;
}

void write_dump_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::kIo, fmt::format("cannot open '{}' for writing", path));
  write_dump(data, out);
  if (!out) throw Error(ErrorCategory::kIo, fmt::format("write to '{}' failed", path));
}

Dataset read_dump_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, fmt::format("cannot open '{}'", path));
  return read_dump(in);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_u64(std::uint64_t value, std::uint64_t seed) {
  char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((value >> (8 * k)) & 0xff);
  return fnv1a(std::string_view(bytes, 8), seed);
}

}  // namespace semicyclic
