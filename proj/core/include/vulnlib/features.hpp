#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vulnlib {

using ColumnId = std::uint32_t;

/// Sorted sparse vector. Column ids are strictly increasing and below dim.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<ColumnId, double>> entries;

  std::size_t nnz() const { return entries.size(); }
  /// Value at `col`, 0 when absent. Binary search.
  double at(ColumnId col) const;
  double squared_norm() const;
};

/// Merge-join dot product. Throws Error(kValidation) on dimension mismatch.
double sparse_dot(const SparseVector& u, const SparseVector& v);

/// Cosine similarity; 0 when either vector is empty.
double cosine(const SparseVector& u, const SparseVector& v);

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Unigrams plus, when ngram_max == 2, adjacent bigrams joined by '_'.
  /// Terms with document frequency below min_df are dropped. Terms are
  /// ordered lexicographically. Throws Error(kValidation) on an empty corpus.
  static Vocabulary fit(const std::vector<std::string>& texts, int ngram_max = 1,
                        std::size_t min_df = 1);

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  std::size_t n_docs() const { return n_docs_; }
  int ngram_max() const { return ngram_max_; }
  std::size_t min_df() const { return min_df_; }

  /// Column of `term`, or -1.
  std::int64_t index_of(std::string_view term) const;
  std::size_t doc_freq_of(std::string_view term) const;
  /// ln((1 + n_docs) / (1 + df)) + 1
  double idf(ColumnId col) const { return idf_[col]; }

  /// Text sidecar: header line, then one "term<TAB>df" line per term.
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text);
  /// FNV-1a 64 over serialize().
  std::uint64_t checksum() const;

 private:
  void rebuild_index();

  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::vector<double> idf_;
  std::unordered_map<std::string, ColumnId> index_;
  std::size_t n_docs_ = 0;
  int ngram_max_ = 1;
  std::size_t min_df_ = 1;
};

/// Whitespace tokens of `text`, extended with '_'-joined bigrams when
/// ngram_max == 2.
std::vector<std::string> ngram_terms(std::string_view text, int ngram_max);

/// tf = raw count, idf = ln((1+n)/(1+df)) + 1, L2-normalized over the
/// non-bias entries. With add_bias the vector has dim = |vocab| + 1 and
/// carries (|vocab|, 1.0) as its last entry.
SparseVector tfidf_transform(std::string_view text, const Vocabulary& vocab, bool add_bias);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace vulnlib
