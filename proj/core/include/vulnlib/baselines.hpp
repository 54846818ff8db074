#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vulnlib/corpus.hpp"
#include "vulnlib/enhance.hpp"
#include "vulnlib/features.hpp"

namespace vulnlib {

/// Ranks labels by how often their library name occurs (case-insensitive,
/// on word boundaries) in `text`. Labels that never occur are dropped; ties
/// resolve by ascending id. `text` is expected lowercased.
std::vector<LabelId> baseline_exact_match(std::string_view text,
                                          const std::map<LabelId, Label>& universe,
                                          std::size_t k);

/// Labels read off the report's CPE 2.3 strings: the product and, when the
/// version field is neither '*' nor '-', product@version. Duplicates keep
/// their first position. Malformed strings are skipped with a warning.
std::vector<LabelId> baseline_cpe(const VulnerabilityReport& report, std::size_t k);

/// Lowercased, cleaned and stemmed form of a label feature text, so labels
/// and enhanced descriptions can share one term space.
std::string matching_text(std::string_view label_feature_text, const EnhanceConfig& cfg);

/// TF-IDF (uni+bigram) cosine ranking of labels against report text.
class IrBaseline {
 public:
  /// `doc_texts` are enhanced descriptions of the fitting corpus;
  /// `label_texts` maps each label to its matching_text().
  IrBaseline(const std::vector<std::string>& doc_texts,
             std::vector<std::pair<LabelId, std::string>> label_texts, int ngram_max = 2);

  std::vector<std::pair<LabelId, double>> rank(std::string_view doc_text, std::size_t k) const;

 private:
  Vocabulary vocab_;
  std::vector<LabelId> ids_;
  std::vector<SparseVector> label_vectors_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings_;
};

}  // namespace vulnlib
