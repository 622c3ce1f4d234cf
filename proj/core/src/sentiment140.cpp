#include "semicyclic/sentiment140.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "semicyclic/error.hpp"
#include "semicyclic/rng.hpp"

namespace semicyclic {

std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool at_start = true;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && at_start) {
      quoted = true;
      at_start = false;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      at_start = true;
    } else if (c == '\r' && k + 1 == line.size()) {
      // CRLF line ending
    } else {
      field += c;
      at_start = false;
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(field));
  return fields;
}

std::optional<int> parse_hour(std::string_view date) {
  // weekday month day HH:MM:SS zone year
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < date.size()) {
    while (pos < date.size() && date[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < date.size() && date[end] != ' ') ++end;
    if (end > pos) parts.push_back(date.substr(pos, end - pos));
    pos = end;
  }
  if (parts.size() != 6) return std::nullopt;
  static constexpr std::array<std::string_view, 12> months = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (std::find(months.begin(), months.end(), parts[1]) == months.end()) return std::nullopt;
  const auto clock = parts[3];
  if (clock.size() != 8 || clock[2] != ':' || clock[5] != ':') return std::nullopt;
  for (std::size_t k : {0u, 1u, 3u, 4u, 6u, 7u}) {
    if (!std::isdigit(static_cast<unsigned char>(clock[k]))) return std::nullopt;
  }
  const int hour = (clock[0] - '0') * 10 + (clock[1] - '0');
  const int minute = (clock[3] - '0') * 10 + (clock[4] - '0');
  const int second = (clock[6] - '0') * 10 + (clock[7] - '0');
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  for (char c : parts[5]) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return hour;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 128 && std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

struct Post {
  int label = 1;
  int component = 0;
  std::vector<std::string> tokens;
};

// Randomly drops posts of the over-represented label until the positive
// rate is as close to `rate` as integer counts allow.
long reskew(std::vector<Post>& posts, int component, double rate, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t k = 0; k < posts.size(); ++k) {
    if (posts[k].component != component) continue;
    (posts[k].label > 0 ? pos : neg).push_back(k);
  }
  const double total = static_cast<double>(pos.size() + neg.size());
  if (total == 0.0) return 0;
  std::vector<std::size_t>* victims = nullptr;
  std::size_t keep = 0;
  if (static_cast<double>(pos.size()) / total > rate) {
    victims = &pos;
    keep = static_cast<std::size_t>(std::llround(rate * static_cast<double>(neg.size()) / (1.0 - rate)));
  } else {
    victims = &neg;
    keep = static_cast<std::size_t>(std::llround((1.0 - rate) * static_cast<double>(pos.size()) / rate));
  }
  keep = std::min(keep, victims->size());
  rng.shuffle(victims->begin(), victims->end());
  for (std::size_t k = keep; k < victims->size(); ++k) posts[(*victims)[k]].component = -1;
  return static_cast<long>(victims->size() - keep);
}

void erase_dropped(std::vector<Post>& posts) {
  posts.erase(std::remove_if(posts.begin(), posts.end(), [](const Post& p) { return p.component < 0; }),
              posts.end());
}

}  // namespace

IngestResult ingest_sentiment140(std::istream& in, const IngestOptions& options) {
  if (options.components < 1 || 24 % options.components != 0) {
    throw_argument(fmt::format("{} components do not divide a 24-hour day", options.components));
  }
  if (!(options.test_fraction >= 0.0 && options.test_fraction < 1.0)) {
    throw_argument("test fraction must lie in [0, 1)");
  }
  if (options.vocabulary < 1) throw_argument("vocabulary must be >= 1");
  if (options.skew) {
    options.skew->validate();
    if (options.skew->components() != options.components) {
      throw_argument("skew spec does not match the component count");
    }
  }
  const int hours_per_block = 24 / options.components;

  IngestResult result;
  IngestReport& report = result.report;
  std::vector<Post> posts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++report.rows;
    const auto fields = split_csv_line(line);
    if (!fields || fields->size() != 6 || ((*fields)[0] != "0" && (*fields)[0] != "4")) {
      ++report.malformed;
      continue;
    }
    const auto hour = parse_hour((*fields)[2]);
    if (!hour) {
      ++report.bad_dates;
      continue;
    }
    posts.push_back({(*fields)[0] == "4" ? 1 : -1, *hour / hours_per_block, tokenize((*fields)[5])});
  }
  if (report.rows == 0) throw Error(ErrorCategory::kIngestion, "no rows in input");
  report.kept = static_cast<long>(posts.size());
  report.skip_rate = static_cast<double>(report.malformed + report.bad_dates) / static_cast<double>(report.rows);
  if (report.skip_rate > options.max_skip_rate) {
    throw Error(ErrorCategory::kIngestion,
                fmt::format("skipped {} of {} rows ({} malformed, {} bad dates): {:.2f}% exceeds {:.2f}%",
                            report.malformed + report.bad_dates, report.rows, report.malformed,
                            report.bad_dates, 100.0 * report.skip_rate, 100.0 * options.max_skip_rate));
  }

  Rng rng(options.split_seed);
  Rng split_rng = rng.split(0);
  split_rng.shuffle(posts.begin(), posts.end());
  const auto test_count = static_cast<std::size_t>(std::llround(options.test_fraction * static_cast<double>(posts.size())));
  std::vector<Post> test(posts.end() - static_cast<std::ptrdiff_t>(test_count), posts.end());
  posts.resize(posts.size() - test_count);
  std::vector<Post>& train = posts;

  if (options.skew) {
    Rng drop_rng = rng.split(1);
    for (int i = 0; i < options.components; ++i) {
      report.dropped_for_skew += reskew(train, i, options.skew->rate(i), drop_rng);
      report.dropped_for_skew += reskew(test, i, options.skew->rate(i), drop_rng);
    }
    erase_dropped(train);
    erase_dropped(test);
  }
  if (options.equalize_components) {
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(options.components));
    for (std::size_t k = 0; k < train.size(); ++k) members[static_cast<std::size_t>(train[k].component)].push_back(k);
    std::size_t smallest = train.size();
    for (const auto& m : members) smallest = std::min(smallest, m.size());
    Rng trim_rng = rng.split(2);
    for (auto& m : members) {
      trim_rng.shuffle(m.begin(), m.end());
      for (std::size_t k = smallest; k < m.size(); ++k) train[m[k]].component = -1;
      report.trimmed_for_balance += static_cast<long>(m.size() - smallest);
    }
    erase_dropped(train);
  }

  // vocabulary: most frequent training tokens by document frequency
  std::unordered_map<std::string, long> df;
  for (const auto& p : train) {
    auto tokens = p.tokens;
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[t];
  }
  std::vector<std::pair<std::string, long>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(options.vocabulary)) ranked.resize(static_cast<std::size_t>(options.vocabulary));
  std::sort(ranked.begin(), ranked.end());
  std::map<std::string, std::uint32_t> index;
  Dataset& data = result.data;
  for (const auto& [token, count] : ranked) {
    index.emplace(token, static_cast<std::uint32_t>(data.vocabulary.size()));
    data.vocabulary.push_back(token);
  }
  data.features = std::max<int>(1, static_cast<int>(data.vocabulary.size()));
  data.components = options.components;

  const auto featurize = [&](const std::vector<Post>& split, std::vector<Example>& out) {
    for (const auto& p : split) {
      Example e;
      e.label = p.label;
      e.component = p.component;
      for (const auto& t : p.tokens) {
        if (auto it = index.find(t); it != index.end()) e.indices.push_back(it->second);
      }
      std::sort(e.indices.begin(), e.indices.end());
      e.indices.erase(std::unique(e.indices.begin(), e.indices.end()), e.indices.end());
      out.push_back(std::move(e));
    }
  };
  featurize(train, data.train);
  featurize(test, data.test);
  data.validate();

  report.train_counts = component_counts(data.train, data.components);
  report.test_counts = component_counts(data.test, data.components);
  for (int i = 0; i < data.components; ++i) report.train_positive_rates.push_back(positive_rate(data.train, i));
  return result;
}

IngestResult ingest_sentiment140(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, fmt::format("cannot open '{}'", path));
  return ingest_sentiment140(in, options);
}

}  // namespace semicyclic
