#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vulnlib {

/// Canonical library identifier: lowercased name, internal whitespace runs
/// collapsed to '_', optional "@version" suffix.
using LabelId = std::string;

/// UTC calendar date.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  /// Accepts "YYYY-MM-DD" optionally followed by a 'T' time part or
  /// whitespace. Returns nullopt on anything that is not a real calendar day.
  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;
  /// Days since 1970-01-01.
  std::int64_t serial() const;
  static Date from_serial(std::int64_t days);
};

struct ReferenceDoc {
  std::string url;
  std::string domain;  // host of url, lowercased, leading "www." removed
  std::optional<std::string> title;
  std::optional<std::string> text;
};

/// Extracts the host part of an http(s)-style URL. Returns nullopt for
/// strings without a scheme separator or with an empty host.
std::optional<std::string> url_domain(std::string_view url);

struct Label {
  LabelId id;
  std::string name;
  std::optional<std::string> version;
  std::string feature_text;
};

/// Normalizes a raw label string ("Foo Bar@1.0 ") into its canonical id.
/// Throws Error(kValidation) if the name part is empty.
LabelId canonical_label_id(std::string_view raw);

/// Builds a Label (without feature text) from a raw or canonical id.
Label make_label(std::string_view raw);

struct VulnerabilityReport {
  std::string id;
  Date published;
  std::string description;
  std::vector<ReferenceDoc> references;
  std::vector<std::string> cpe_entries;
  std::set<LabelId> labels;
};

enum class LoadMode { kLabeled, kUnlabeled };

struct Dataset {
  std::vector<VulnerabilityReport> reports;
  std::map<LabelId, Label> labels;

  bool empty() const { return reports.empty(); }
  std::size_t size() const { return reports.size(); }

  /// Sorts reports by (published, id).
  void sort_chronologically();

  /// Throws Error(kValidation) on duplicate ids or labels missing from the
  /// universe.
  void validate() const;
};

/// Reads a JSON-Lines dataset. `label_universe_path`, when given, names a
/// file with one canonical label id per line that is merged into the
/// universe. Reports come back sorted by (published, id).
Dataset load_dataset(const std::filesystem::path& path, LoadMode mode,
                     const std::optional<std::filesystem::path>&
                         label_universe_path = std::nullopt);

/// Parses a dataset from in-memory JSON-Lines text; `source` is used in
/// error messages.
Dataset parse_dataset(std::string_view jsonl, LoadMode mode,
                      std::string_view source = "<memory>");

/// Writes reports as JSON-Lines in their current order.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
std::string dataset_to_jsonl(const Dataset& dataset);

/// Writes the label universe, one id per line, sorted.
void write_label_universe(const Dataset& dataset,
                          const std::filesystem::path& path);

struct ChronoSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

struct SplitRatio {
  unsigned train = 3;
  unsigned validation = 1;
  unsigned test = 2;
};

/// Inclusive last year of the training and validation periods; everything
/// later is test. {2016, 2017} gives 2014-2016 | 2017 | 2018-2019.
struct YearBoundaries {
  int train_last_year = 2016;
  int validation_last_year = 2017;
};

/// Cuts by report count. A cut that lands inside a run of equal dates is
/// moved to the end of that run, so ties always go to the earlier split.
ChronoSplit chronological_split(const Dataset& dataset, SplitRatio ratio = {});
ChronoSplit chronological_split(const Dataset& dataset, YearBoundaries years);

enum class CensusGranularity { kPerYear, kPerSplit };

struct PeriodCensus {
  std::string period;
  std::size_t total_labels = 0;
  std::size_t seen_labels = 0;
  std::size_t unseen_labels = 0;
  std::size_t total_reports = 0;  // reports with at least one label
  std::size_t seen_only_reports = 0;
  std::size_t full_unseen_reports = 0;
  std::size_t any_unseen_reports = 0;
};

struct CensusReport {
  CensusGranularity granularity = CensusGranularity::kPerYear;
  std::vector<PeriodCensus> periods;

  std::string to_table() const;
  std::string to_json() const;
};

/// A label is seen in a period if it occurs in any strictly earlier period.
CensusReport unseen_census(const ChronoSplit& split,
                           CensusGranularity granularity);

}  // namespace vulnlib
