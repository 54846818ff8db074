#include "vulnlib/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "vulnlib/error.hpp"

namespace vulnlib {

double SparseVector::at(ColumnId col) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), col,
                             [](const auto& e, ColumnId c) { return e.first < c; });
  return (it != entries.end() && it->first == col) ? it->second : 0.0;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& [_, v] : entries) s += v * v;
  return s;
}

double sparse_dot(const SparseVector& u, const SparseVector& v) {
  if (u.dim != v.dim) {
    throw Error(ErrorKind::kValidation, "sparse_dot: dimension mismatch (" +
                                            std::to_string(u.dim) + " vs " +
                                            std::to_string(v.dim) + ")");
  }
  double sum = 0.0;
  auto a = u.entries.begin(), ae = u.entries.end();
  auto b = v.entries.begin(), be = v.entries.end();
  while (a != ae && b != be) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

double cosine(const SparseVector& u, const SparseVector& v) {
  double nu = u.squared_norm(), nv = v.squared_norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return sparse_dot(u, v) / std::sqrt(nu * nv);
}

std::vector<std::string> ngram_terms(std::string_view text, int ngram_max) {
  std::vector<std::string> unigrams;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) unigrams.emplace_back(text.substr(start, i - start));
  }
  if (ngram_max < 2) return unigrams;
  std::vector<std::string> out = unigrams;
  for (std::size_t k = 0; k + 1 < unigrams.size(); ++k)
    out.push_back(unigrams[k] + "_" + unigrams[k + 1]);
  return out;
}

Vocabulary Vocabulary::fit(const std::vector<std::string>& texts, int ngram_max,
                           std::size_t min_df) {
  if (texts.empty()) throw Error(ErrorKind::kValidation, "cannot fit a vocabulary on an empty corpus");
  if (ngram_max != 1 && ngram_max != 2)
    throw Error(ErrorKind::kConfig, "ngram_max must be 1 or 2");
  std::map<std::string, std::size_t> df;
  for (const auto& text : texts) {
    auto terms = ngram_terms(text, ngram_max);
    std::set<std::string> uniq(terms.begin(), terms.end());
    for (const auto& t : uniq) ++df[t];
  }
  Vocabulary v;
  v.n_docs_ = texts.size();
  v.ngram_max_ = ngram_max;
  v.min_df_ = std::max<std::size_t>(min_df, 1);
  for (const auto& [term, count] : df) {
    if (count < v.min_df_) continue;
    v.terms_.push_back(term);
    v.doc_freq_.push_back(count);
  }
  v.rebuild_index();
  return v;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  idf_.resize(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    index_.emplace(terms_[i], static_cast<ColumnId>(i));
    idf_[i] = std::log((1.0 + static_cast<double>(n_docs_)) /
                       (1.0 + static_cast<double>(doc_freq_[i]))) +
              1.0;
  }
}

std::int64_t Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::size_t Vocabulary::doc_freq_of(std::string_view term) const {
  auto idx = index_of(term);
  return idx < 0 ? 0 : doc_freq_[static_cast<std::size_t>(idx)];
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  out << "vulnlib-vocab 1 " << ngram_max_ << ' ' << min_df_ << ' ' << n_docs_ << ' '
      << terms_.size() << '\n';
  for (std::size_t i = 0; i < terms_.size(); ++i)
    out << terms_[i] << '\t' << doc_freq_[i] << '\n';
  return out.str();
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  int version = 0;
  std::size_t n_terms = 0;
  Vocabulary v;
  if (!(in >> magic >> version >> v.ngram_max_ >> v.min_df_ >> v.n_docs_ >> n_terms) ||
      magic != "vulnlib-vocab") {
    throw Error(ErrorKind::kParse, "vocabulary sidecar: bad header");
  }
  if (version != 1) throw Error(ErrorKind::kModelMismatch, "vocabulary sidecar: unsupported version");
  std::string line;
  std::getline(in, line);
  v.terms_.reserve(n_terms);
  v.doc_freq_.reserve(n_terms);
  for (std::size_t i = 0; i < n_terms; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "vocabulary sidecar: truncated");
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error(ErrorKind::kParse, "vocabulary sidecar: bad line");
    v.terms_.push_back(line.substr(0, tab));
    v.doc_freq_.push_back(std::stoull(line.substr(tab + 1)));
  }
  v.rebuild_index();
  return v;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t Vocabulary::checksum() const { return fnv1a64(serialize()); }

SparseVector tfidf_transform(std::string_view text, const Vocabulary& vocab, bool add_bias) {
  std::map<ColumnId, double> counts;
  for (const auto& term : ngram_terms(text, vocab.ngram_max())) {
    auto idx = vocab.index_of(term);
    if (idx >= 0) counts[static_cast<ColumnId>(idx)] += 1.0;
  }
  SparseVector v;
  v.dim = vocab.size() + (add_bias ? 1 : 0);
  v.entries.reserve(counts.size() + 1);
  double norm = 0.0;
  for (const auto& [col, tf] : counts) {
    double value = tf * vocab.idf(col);
    v.entries.emplace_back(col, value);
    norm += value * value;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& e : v.entries) e.second /= norm;
  }
  if (add_bias) v.entries.emplace_back(static_cast<ColumnId>(vocab.size()), 1.0);
  return v;
}

}  // namespace vulnlib
