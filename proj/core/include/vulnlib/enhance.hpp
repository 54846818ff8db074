#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vulnlib/corpus.hpp"

namespace vulnlib {

using Token = std::string;
using TokenList = std::vector<Token>;

/// The twelve most frequent reference domains of the public dataset.
const std::set<std::string>& default_domain_allowlist();
/// English stopword list used by stem_and_filter when none is configured.
const std::set<std::string>& default_stopwords();

struct EnhanceConfig {
  std::set<std::string> domain_allowlist = default_domain_allowlist();
  /// Share of distinct reference words, by corpus count, that is dropped.
  double top_word_cut_percent = 50.0;
  /// A word occurring more than this many times in one reference is dropped
  /// from that reference.
  std::size_t per_reference_cap = 15;
  std::set<std::string> stopwords = default_stopwords();
  /// Description words present in more than this fraction of training
  /// descriptions are dropped. 1.0 disables the filter.
  double description_common_cut = 0.30;

  /// Throws Error(kConfig) when x is outside [0,100] or y < 1.
  void validate() const;
};

inline constexpr std::size_t kNoReferenceCap = std::numeric_limits<std::size_t>::max();

/// True when `domain` equals an allowlisted domain or is a subdomain of one.
bool domain_allowed(std::string_view domain, const std::set<std::string>& allowlist);

std::vector<ReferenceDoc> select_references(const VulnerabilityReport& report,
                                            const EnhanceConfig& cfg);

/// Every maximal match of [a-zA-Z][a-z]+, lowercased.
TokenList clean_text(std::string_view raw);

TokenList stem_and_filter(const TokenList& tokens, const EnhanceConfig& cfg);

/// Corpus-level state for reference pruning: the set of globally frequent
/// words (top x% of distinct words by count) plus the per-reference cap.
class ReferencePruner {
 public:
  ReferencePruner() = default;
  ReferencePruner(std::set<Token> removed, std::size_t per_reference_cap)
      : removed_(std::move(removed)), cap_(per_reference_cap) {}

  static ReferencePruner fit(const std::vector<TokenList>& reference_tokens,
                             double top_word_cut_percent,
                             std::size_t per_reference_cap);

  TokenList apply(const TokenList& reference) const;

  const std::set<Token>& removed_words() const { return removed_; }
  std::size_t per_reference_cap() const { return cap_; }

 private:
  std::set<Token> removed_;
  std::size_t cap_ = kNoReferenceCap;
};

/// Fits a pruner on the given lists and applies it to the same lists.
std::vector<TokenList> prune_reference_tokens(const std::vector<TokenList>& ref_token_lists,
                                              const EnhanceConfig& cfg);

/// Description tokens first, then reference tokens in reference order,
/// space-joined.
std::string merge_description(const std::vector<TokenList>& kept_refs_tokens,
                              const TokenList& desc_tokens);

/// Identifier splitting used for label feature text.
TokenList split_on_delimiters(std::string_view name);
TokenList split_camel_case(std::string_view token);

/// Sub-word dictionary built from the delimiter-split tokens of every label
/// name in a universe.
class SubwordDictionary {
 public:
  SubwordDictionary() = default;
  explicit SubwordDictionary(std::set<std::string> words);

  static SubwordDictionary build(const std::map<LabelId, Label>& universe);

  /// Greedy longest-match-first split, left to right. A piece never covers
  /// the whole token; once no dictionary word matches at the current
  /// position the remainder is kept whole. Returns {token} when nothing
  /// matched.
  TokenList split(std::string_view token) const;

  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
  std::size_t max_len_ = 0;
};

/// Feature text for a label: the full name, then delimiter tokens,
/// camelCase pieces and dictionary pieces. Versions of one library share
/// their feature text.
std::string split_label_subwords(const Label& label, const SubwordDictionary& dictionary);

/// Feature text used when data enhancement is disabled: the name only
/// (without version).
std::string plain_label_text(const Label& label);

/// Frozen corpus-level state needed to enhance any report. Fitted on the
/// training split only.
class Enhancer {
 public:
  Enhancer() = default;
  Enhancer(EnhanceConfig cfg, ReferencePruner pruner, std::set<Token> common_description_words,
           SubwordDictionary dictionary, bool enabled);

  /// `enabled == false` gives the ablation without reference text and
  /// without label sub-word splitting.
  static Enhancer fit(const Dataset& train, const std::map<LabelId, Label>& universe,
                      const EnhanceConfig& cfg, bool enabled = true);

  TokenList description_tokens(const VulnerabilityReport& report) const;
  std::vector<TokenList> reference_tokens(const VulnerabilityReport& report) const;
  std::string enhanced_text(const VulnerabilityReport& report) const;
  std::string label_text(const Label& label) const;

  /// Lowercased raw text (description plus kept references) for substring
  /// matching baselines.
  std::string raw_text(const VulnerabilityReport& report, bool include_references) const;

  bool enabled() const { return enabled_; }
  const EnhanceConfig& config() const { return cfg_; }
  const ReferencePruner& pruner() const { return pruner_; }
  const std::set<Token>& common_description_words() const { return common_desc_; }
  const SubwordDictionary& dictionary() const { return dictionary_; }

  std::string to_json() const;
  static Enhancer from_json(std::string_view text);

 private:
  EnhanceConfig cfg_;
  ReferencePruner pruner_;
  std::set<Token> common_desc_;
  SubwordDictionary dictionary_;
  bool enabled_ = true;
};

}  // namespace vulnlib
