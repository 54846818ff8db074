#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "vulnlib/corpus.hpp"
#include "vulnlib/enhance.hpp"
#include "vulnlib/learner.hpp"
#include "vulnlib/temporal.hpp"

namespace vulnlib {

enum class SplitMode { kRatio, kYears };

/// Every tunable of the pipeline. Defaults: c = 300, M = 8, i = 10,
/// x = 50, y = 15; K, lambda and the sampling knobs are desk-scale choices.
struct EngineConfig {
  EnhanceConfig enhance;
  bool use_enhancement = true;
  int doc_ngram_max = 1;
  int label_ngram_max = 1;
  std::size_t min_df = 1;
  int ir_ngram_max = 2;
  LearnerParams learner;
  std::size_t cache_size = 300;
  AdjustmentParams adjustment;
  bool use_adjustment = true;
  bool prewarm_cache = true;
  std::size_t k = 3;
  std::uint64_t seed = 0;
  SplitMode split_mode = SplitMode::kRatio;
  SplitRatio split_ratio;
  YearBoundaries split_years;
  bool exact_match_uses_references = true;

  /// Throws Error(kConfig) on the first violated constraint.
  void validate() const;

  /// Applies one "key = value" setting. Throws Error(kConfig) for unknown
  /// keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Reads a key/value file: one "key = value" per line, '#' comments.
  static EngineConfig load(const std::filesystem::path& path);
  /// Parses key/value text on top of the defaults.
  static EngineConfig parse(std::string_view text, std::string_view source = "<memory>");

  /// Key/value text that parse() maps back to this configuration.
  std::string to_text() const;
};

}  // namespace vulnlib
