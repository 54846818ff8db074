#include "vulnlib/enhance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"
#include "vulnlib/porter_stemmer.hpp"

namespace vulnlib {

using nlohmann::json;

const std::set<std::string>& default_domain_allowlist() {
  static const std::set<std::string> domains = {
      "access.redhat.com", "list.opensuse.org",   "github.com",
      "debian.org",        "oracle.com",          "securitytracker.com",
      "security.gentoo.org", "ubuntu.com",        "usn.ubuntu.com",
      "openwall.com",      "lists.fedoraproject.org", "bugzilla.redhat.com"};
  return domains;
}

const std::set<std::string>& default_stopwords() {
  // NLTK English list.
  static const std::set<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your",
      "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her",
      "hers", "herself", "it", "its", "itself", "they", "them", "their", "theirs",
      "themselves", "what", "which", "who", "whom", "this", "that", "these", "those",
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
      "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
      "or", "because", "as", "until", "while", "of", "at", "by", "for", "with",
      "about", "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where",
      "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
      "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too",
      "very", "s", "t", "can", "will", "just", "don", "should", "now", "d", "ll",
      "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn",
      "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn",
      "wasn", "weren", "won", "wouldn"};
  return words;
}

void EnhanceConfig::validate() const {
  if (!(top_word_cut_percent >= 0.0 && top_word_cut_percent <= 100.0))
    throw Error(ErrorKind::kConfig, "top_word_cut_percent must lie in [0,100]");
  if (per_reference_cap < 1) throw Error(ErrorKind::kConfig, "per_reference_cap must be >= 1");
  if (!(description_common_cut > 0.0 && description_common_cut <= 1.0))
    throw Error(ErrorKind::kConfig, "description_common_cut must lie in (0,1]");
}

bool domain_allowed(std::string_view domain, const std::set<std::string>& allowlist) {
  if (domain.empty()) return false;
  std::string d(domain);
  if (allowlist.count(d)) return true;
  for (auto dot = d.find('.'); dot != std::string::npos; dot = d.find('.', dot + 1)) {
    if (allowlist.count(d.substr(dot + 1))) return true;
  }
  return false;
}

std::vector<ReferenceDoc> select_references(const VulnerabilityReport& report,
                                            const EnhanceConfig& cfg) {
  std::vector<ReferenceDoc> kept;
  for (const auto& ref : report.references) {
    auto domain = ref.domain.empty() ? url_domain(ref.url) : std::optional<std::string>(ref.domain);
    if (!domain) {
      log::warn("report " + report.id + ": skipping malformed reference URL '" + ref.url + "'");
      continue;
    }
    if (!domain_allowed(*domain, cfg.domain_allowlist)) continue;
    ReferenceDoc doc = ref;
    doc.domain = *domain;
    kept.push_back(std::move(doc));
  }
  return kept;
}

TokenList clean_text(std::string_view raw) {
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto is_lower = [](char c) { return c >= 'a' && c <= 'z'; };
  TokenList out;
  std::size_t i = 0;
  const std::size_t n = raw.size();
  while (i < n) {
    if (is_alpha(raw[i]) && i + 1 < n && is_lower(raw[i + 1])) {
      std::size_t end = i + 2;
      while (end < n && is_lower(raw[end])) ++end;
      std::string tok(raw.substr(i, end - i));
      tok[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(tok[0])));
      out.push_back(std::move(tok));
      i = end;
    } else {
      ++i;
    }
  }
  return out;
}

TokenList stem_and_filter(const TokenList& tokens, const EnhanceConfig& cfg) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (cfg.stopwords.count(t)) continue;
    out.push_back(porter_stem(t));
  }
  return out;
}

ReferencePruner ReferencePruner::fit(const std::vector<TokenList>& reference_tokens,
                                     double top_word_cut_percent,
                                     std::size_t per_reference_cap) {
  std::map<Token, std::size_t> counts;
  for (const auto& ref : reference_tokens)
    for (const auto& t : ref) ++counts[t];
  std::vector<std::pair<Token, std::size_t>> ranked(counts.begin(), counts.end());
  // Highest count first; equal counts resolve lexicographically.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  auto n_remove = static_cast<std::size_t>(
      std::ceil(static_cast<double>(ranked.size()) * top_word_cut_percent / 100.0 - 1e-12));
  n_remove = std::min(n_remove, ranked.size());
  std::set<Token> removed;
  for (std::size_t i = 0; i < n_remove; ++i) removed.insert(ranked[i].first);
  return ReferencePruner(std::move(removed), per_reference_cap);
}

TokenList ReferencePruner::apply(const TokenList& reference) const {
  std::unordered_map<std::string_view, std::size_t> local;
  for (const auto& t : reference) ++local[t];
  TokenList out;
  out.reserve(reference.size());
  for (const auto& t : reference) {
    if (removed_.count(t)) continue;
    if (local[t] > cap_) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<TokenList> prune_reference_tokens(const std::vector<TokenList>& ref_token_lists,
                                              const EnhanceConfig& cfg) {
  auto pruner = ReferencePruner::fit(ref_token_lists, cfg.top_word_cut_percent,
                                     cfg.per_reference_cap);
  std::vector<TokenList> out;
  out.reserve(ref_token_lists.size());
  for (const auto& ref : ref_token_lists) out.push_back(pruner.apply(ref));
  return out;
}

std::string merge_description(const std::vector<TokenList>& kept_refs_tokens,
                              const TokenList& desc_tokens) {
  std::string out;
  auto add = [&](const Token& t) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  };
  for (const auto& t : desc_tokens) add(t);
  for (const auto& ref : kept_refs_tokens)
    for (const auto& t : ref) add(t);
  return out;
}

TokenList split_on_delimiters(std::string_view name) {
  TokenList out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : name) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (c == '.' || c == '-' || c == '_' || c == ':' || c == '/' || c == '@' ||
        std::isspace(uc)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      bool prev_digit = std::isdigit(static_cast<unsigned char>(cur.back())) != 0;
      if (prev_digit != (std::isdigit(uc) != 0)) flush();
    }
    cur.push_back(c);
  }
  flush();
  return out;
}

TokenList split_camel_case(std::string_view token) {
  TokenList out;
  std::string cur;
  auto up = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto lo = [](char c) { return c >= 'a' && c <= 'z'; };
  for (std::size_t i = 0; i < token.size(); ++i) {
    char c = token[i];
    bool boundary = false;
    if (!cur.empty() && up(c)) {
      if (lo(cur.back())) boundary = true;
      // "XMLParser": split before the last capital of an acronym run.
      else if (up(cur.back()) && i + 1 < token.size() && lo(token[i + 1])) boundary = true;
    }
    if (boundary) {
      out.push_back(std::move(cur));
      cur.clear();
    }
    cur.push_back(c);
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  for (auto& t : out)
    for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

SubwordDictionary::SubwordDictionary(std::set<std::string> words) : words_(std::move(words)) {
  for (const auto& w : words_) max_len_ = std::max(max_len_, w.size());
}

SubwordDictionary SubwordDictionary::build(const std::map<LabelId, Label>& universe) {
  std::set<std::string> words;
  for (const auto& [id, label] : universe) {
    for (auto& tok : split_on_delimiters(label.name)) {
      for (auto& piece : split_camel_case(tok)) {
        bool alpha = std::all_of(piece.begin(), piece.end(),
                                 [](char c) { return c >= 'a' && c <= 'z'; });
        if (alpha && piece.size() >= 2) words.insert(piece);
      }
    }
  }
  return SubwordDictionary(std::move(words));
}

TokenList SubwordDictionary::split(std::string_view token) const {
  TokenList pieces;
  std::size_t pos = 0;
  const std::size_t n = token.size();
  while (pos < n) {
    std::size_t best = 0;
    std::size_t limit = std::min(max_len_, n - pos);
    for (std::size_t len = limit; len >= 2; --len) {
      if (pos == 0 && len == n) continue;
      if (words_.count(std::string(token.substr(pos, len)))) {
        best = len;
        break;
      }
    }
    if (best == 0) {
      pieces.emplace_back(token.substr(pos));
      break;
    }
    pieces.emplace_back(token.substr(pos, best));
    pos += best;
  }
  if (pieces.size() <= 1) return {std::string(token)};
  return pieces;
}

std::string split_label_subwords(const Label& label, const SubwordDictionary& dictionary) {
  TokenList parts{label.name};
  TokenList delim = split_on_delimiters(label.name);
  if (delim.size() > 1 || (delim.size() == 1 && delim[0] != label.name)) {
    parts.insert(parts.end(), delim.begin(), delim.end());
  }
  for (const auto& tok : delim) {
    TokenList camel = split_camel_case(tok);
    if (camel.size() > 1) parts.insert(parts.end(), camel.begin(), camel.end());
    for (const auto& piece : camel) {
      TokenList sub = dictionary.split(piece);
      if (sub.size() > 1) parts.insert(parts.end(), sub.begin(), sub.end());
    }
  }
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

std::string plain_label_text(const Label& label) {
  return label.name;
}

Enhancer::Enhancer(EnhanceConfig cfg, ReferencePruner pruner,
                   std::set<Token> common_description_words, SubwordDictionary dictionary,
                   bool enabled)
    : cfg_(std::move(cfg)),
      pruner_(std::move(pruner)),
      common_desc_(std::move(common_description_words)),
      dictionary_(std::move(dictionary)),
      enabled_(enabled) {}

namespace {

TokenList reference_raw_tokens(const ReferenceDoc& ref, const EnhanceConfig& cfg) {
  std::string text;
  if (ref.title) text += *ref.title;
  if (ref.text) {
    text.push_back(' ');
    text += *ref.text;
  }
  return stem_and_filter(clean_text(text), cfg);
}

}  // namespace

Enhancer Enhancer::fit(const Dataset& train, const std::map<LabelId, Label>& universe,
                       const EnhanceConfig& cfg, bool enabled) {
  cfg.validate();
  std::map<Token, std::size_t> doc_freq;
  std::vector<TokenList> ref_tokens;
  for (const auto& r : train.reports) {
    TokenList desc = stem_and_filter(clean_text(r.description), cfg);
    std::set<Token> uniq(desc.begin(), desc.end());
    for (const auto& t : uniq) ++doc_freq[t];
    if (enabled) {
      for (const auto& ref : select_references(r, cfg))
        ref_tokens.push_back(reference_raw_tokens(ref, cfg));
    }
  }
  std::set<Token> common;
  const double limit = cfg.description_common_cut * static_cast<double>(train.size());
  if (cfg.description_common_cut < 1.0) {
    for (const auto& [t, df] : doc_freq)
      if (static_cast<double>(df) > limit) common.insert(t);
  }
  ReferencePruner pruner = enabled ? ReferencePruner::fit(ref_tokens, cfg.top_word_cut_percent,
                                                          cfg.per_reference_cap)
                                   : ReferencePruner();
  SubwordDictionary dict = enabled ? SubwordDictionary::build(universe) : SubwordDictionary();
  return Enhancer(cfg, std::move(pruner), std::move(common), std::move(dict), enabled);
}

TokenList Enhancer::description_tokens(const VulnerabilityReport& report) const {
  TokenList toks = stem_and_filter(clean_text(report.description), cfg_);
  if (common_desc_.empty()) return toks;
  TokenList out;
  out.reserve(toks.size());
  for (auto& t : toks)
    if (!common_desc_.count(t)) out.push_back(std::move(t));
  return out;
}

std::vector<TokenList> Enhancer::reference_tokens(const VulnerabilityReport& report) const {
  std::vector<TokenList> out;
  if (!enabled_) return out;
  for (const auto& ref : select_references(report, cfg_))
    out.push_back(pruner_.apply(reference_raw_tokens(ref, cfg_)));
  return out;
}

std::string Enhancer::enhanced_text(const VulnerabilityReport& report) const {
  return merge_description(reference_tokens(report), description_tokens(report));
}

std::string Enhancer::label_text(const Label& label) const {
  return enabled_ ? split_label_subwords(label, dictionary_) : plain_label_text(label);
}

std::string Enhancer::raw_text(const VulnerabilityReport& report, bool include_references) const {
  std::string text = report.description;
  if (include_references && enabled_) {
    for (const auto& ref : select_references(report, cfg_)) {
      if (ref.title) text += " " + *ref.title;
      if (ref.text) text += " " + *ref.text;
    }
  }
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text;
}

std::string Enhancer::to_json() const {
  json j;
  j["format"] = "vulnlib-enhancer";
  j["version"] = 1;
  j["enabled"] = enabled_;
  j["domain_allowlist"] = cfg_.domain_allowlist;
  j["top_word_cut_percent"] = cfg_.top_word_cut_percent;
  j["per_reference_cap"] = cfg_.per_reference_cap;
  j["stopwords"] = cfg_.stopwords;
  j["description_common_cut"] = cfg_.description_common_cut;
  j["pruned_reference_words"] = pruner_.removed_words();
  j["common_description_words"] = common_desc_;
  j["dictionary"] = dictionary_.words();
  return j.dump(1) + "\n";
}

Enhancer Enhancer::from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || j.value("format", "") != "vulnlib-enhancer")
    throw Error(ErrorKind::kParse, "not an enhancer sidecar");
  if (j.value("version", 0) != 1)
    throw Error(ErrorKind::kModelMismatch, "unsupported enhancer sidecar version");
  try {
    EnhanceConfig cfg;
    cfg.domain_allowlist = j.at("domain_allowlist").get<std::set<std::string>>();
    cfg.top_word_cut_percent = j.at("top_word_cut_percent").get<double>();
    cfg.per_reference_cap = j.at("per_reference_cap").get<std::size_t>();
    cfg.stopwords = j.at("stopwords").get<std::set<std::string>>();
    cfg.description_common_cut = j.at("description_common_cut").get<double>();
    ReferencePruner pruner(j.at("pruned_reference_words").get<std::set<Token>>(),
                           cfg.per_reference_cap);
    return Enhancer(std::move(cfg), std::move(pruner),
                    j.at("common_description_words").get<std::set<Token>>(),
                    SubwordDictionary(j.at("dictionary").get<std::set<std::string>>()),
                    j.at("enabled").get<bool>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("enhancer sidecar: ") + e.what());
  }
}

}  // namespace vulnlib
