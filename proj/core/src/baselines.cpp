#include "vulnlib/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"

namespace vulnlib {
namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  std::size_t pos = text.find(needle);
  while (pos != std::string_view::npos) {
    std::size_t end = pos + needle.size();
    bool left_ok = pos == 0 || !word_char(text[pos - 1]);
    bool right_ok = end == text.size() || !word_char(text[end]);
    if (left_ok && right_ok) {
      ++count;
      pos = text.find(needle, end);
    } else {
      pos = text.find(needle, pos + 1);
    }
  }
  return count;
}

}  // namespace

std::vector<LabelId> baseline_exact_match(std::string_view text,
                                          const std::map<LabelId, Label>& universe,
                                          std::size_t k) {
  std::map<std::string, std::size_t> by_name;
  for (const auto& [id, label] : universe) {
    if (by_name.count(label.name)) continue;
    std::size_t c = count_occurrences(text, label.name);
    if (label.name.find('_') != std::string::npos) {
      std::string spaced = label.name;
      std::replace(spaced.begin(), spaced.end(), '_', ' ');
      c += count_occurrences(text, spaced);
    }
    by_name[label.name] = c;
  }
  std::vector<std::pair<std::size_t, LabelId>> hits;
  for (const auto& [id, label] : universe) {
    std::size_t c = by_name[label.name];
    if (c > 0) hits.emplace_back(c, id);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<LabelId> out;
  for (std::size_t r = 0; r < std::min(k, hits.size()); ++r) out.push_back(hits[r].second);
  return out;
}

namespace {

// Splits on ':' except where escaped with '\'; removes the escapes.
std::vector<std::string> split_cpe(std::string_view s) {
  std::vector<std::string> out(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      out.back().push_back(s[++i]);
    } else if (s[i] == ':') {
      out.emplace_back();
    } else {
      out.back().push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

std::vector<LabelId> baseline_cpe(const VulnerabilityReport& report, std::size_t k) {
  std::vector<LabelId> out;
  std::set<LabelId> seen;
  auto add = [&](const LabelId& id) {
    if (seen.insert(id).second) out.push_back(id);
  };
  for (const auto& cpe : report.cpe_entries) {
    auto f = split_cpe(cpe);
    if (f.size() < 6 || f[0] != "cpe" || f[1] != "2.3" || f[4].empty() || f[4] == "*" ||
        f[4] == "-") {
      log::warn("report " + report.id + ": skipping malformed CPE '" + cpe + "'");
      continue;
    }
    std::string product = f[4];
    std::replace(product.begin(), product.end(), '_', ' ');
    try {
      LabelId name = canonical_label_id(product);
      add(name);
      const std::string& version = f[5];
      if (!version.empty() && version != "*" && version != "-") add(canonical_label_id(name + "@" + version));
    } catch (const Error&) {
      log::warn("report " + report.id + ": skipping CPE with unusable product '" + cpe + "'");
    }
  }
  if (out.size() > k) out.resize(k);
  return out;
}

std::string matching_text(std::string_view label_feature_text, const EnhanceConfig& cfg) {
  return merge_description({}, stem_and_filter(clean_text(label_feature_text), cfg));
}

IrBaseline::IrBaseline(const std::vector<std::string>& doc_texts,
                       std::vector<std::pair<LabelId, std::string>> label_texts, int ngram_max) {
  if (label_texts.empty()) throw Error(ErrorKind::kValidation, "IR baseline needs labels");
  std::sort(label_texts.begin(), label_texts.end());
  std::vector<std::string> corpus = doc_texts;
  for (const auto& [_, t] : label_texts) corpus.push_back(t);
  vocab_ = Vocabulary::fit(corpus, ngram_max, 1);
  postings_.resize(vocab_.size());
  for (std::uint32_t j = 0; j < label_texts.size(); ++j) {
    ids_.push_back(label_texts[j].first);
    label_vectors_.push_back(tfidf_transform(label_texts[j].second, vocab_, false));
    for (const auto& [c, v] : label_vectors_.back().entries) postings_[c].emplace_back(j, v);
  }
}

std::vector<std::pair<LabelId, double>> IrBaseline::rank(std::string_view doc_text,
                                                         std::size_t k) const {
  SparseVector d = tfidf_transform(doc_text, vocab_, false);
  std::vector<double> sim(ids_.size(), 0.0);
  for (const auto& [c, v] : d.entries)
    for (const auto& [j, lv] : postings_[c]) sim[j] += v * lv;
  std::vector<std::uint32_t> idx(ids_.size());
  for (std::uint32_t j = 0; j < idx.size(); ++j) idx[j] = j;
  std::size_t n = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      return sim[a] != sim[b] ? sim[a] > sim[b] : ids_[a] < ids_[b];
                    });
  std::vector<std::pair<LabelId, double>> out;
  for (std::size_t r = 0; r < n; ++r) out.emplace_back(ids_[idx[r]], sim[idx[r]]);
  return out;
}

}  // namespace vulnlib
