#include "vulnlib/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vulnlib/error.hpp"

namespace vulnlib {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::kConfig,
              "invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  std::string s(value);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, value);
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

std::vector<std::string> split_list(std::string_view value, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto pos = value.find(sep, start);
    std::string item = trim(value.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void EngineConfig::validate() const {
  enhance.validate();
  learner.validate();
  adjustment.validate();
  if (cache_size == 0) throw Error(ErrorKind::kConfig, "cache_size must be positive");
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  if (doc_ngram_max < 1 || doc_ngram_max > 2 || label_ngram_max < 1 || label_ngram_max > 2 ||
      ir_ngram_max < 1 || ir_ngram_max > 2)
    throw Error(ErrorKind::kConfig, "n-gram settings must be 1 or 2");
  if (split_ratio.train + split_ratio.validation + split_ratio.test == 0)
    throw Error(ErrorKind::kConfig, "split ratio sums to zero");
  if (split_years.validation_last_year < split_years.train_last_year)
    throw Error(ErrorKind::kConfig, "split years out of order");
}

void EngineConfig::set(std::string_view key_in, std::string_view value_in) {
  std::string key = trim(key_in);
  std::string value = trim(value_in);
  if (key == "x" || key == "top_word_cut_percent") {
    enhance.top_word_cut_percent = parse_real(key, value);
  } else if (key == "y" || key == "per_reference_cap") {
    enhance.per_reference_cap = value == "inf" ? kNoReferenceCap : parse_integer<std::size_t>(key, value);
  } else if (key == "domain_allowlist") {
    auto items = split_list(value, ',');
    enhance.domain_allowlist = std::set<std::string>(items.begin(), items.end());
  } else if (key == "description_common_cut") {
    enhance.description_common_cut = parse_real(key, value);
  } else if (key == "enhance") {
    use_enhancement = parse_bool(key, value);
  } else if (key == "doc_ngram_max") {
    doc_ngram_max = parse_integer<int>(key, value);
  } else if (key == "label_ngram_max") {
    label_ngram_max = parse_integer<int>(key, value);
  } else if (key == "min_df") {
    min_df = parse_integer<std::size_t>(key, value);
  } else if (key == "ir_ngram_max") {
    ir_ngram_max = parse_integer<int>(key, value);
  } else if (key == "K") {
    learner.K = parse_integer<std::size_t>(key, value);
  } else if (key == "lambda") {
    learner.lambda = parse_real(key, value);
  } else if (key == "negatives_per_doc") {
    learner.negatives_per_doc = parse_integer<std::size_t>(key, value);
  } else if (key == "refine_passes") {
    learner.refine_passes = parse_integer<std::size_t>(key, value);
  } else if (key == "candidate_cap") {
    learner.candidate_cap = parse_integer<std::size_t>(key, value);
  } else if (key == "c" || key == "cache_size") {
    cache_size = parse_integer<std::size_t>(key, value);
  } else if (key == "M") {
    adjustment.M = parse_real(key, value);
  } else if (key == "i" || key == "top_window") {
    adjustment.i = parse_integer<std::size_t>(key, value);
  } else if (key == "adjust") {
    use_adjustment = parse_bool(key, value);
  } else if (key == "prewarm_cache") {
    prewarm_cache = parse_bool(key, value);
  } else if (key == "k") {
    k = parse_integer<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "split") {
    if (value == "ratio") split_mode = SplitMode::kRatio;
    else if (value == "years") split_mode = SplitMode::kYears;
    else bad_value(key, value);
  } else if (key == "split_ratio") {
    auto parts = split_list(value, ':');
    if (parts.size() != 3) bad_value(key, value);
    split_ratio = {parse_integer<unsigned>(key, parts[0]), parse_integer<unsigned>(key, parts[1]),
                   parse_integer<unsigned>(key, parts[2])};
  } else if (key == "split_years") {
    auto parts = split_list(value, ',');
    if (parts.size() != 2) bad_value(key, value);
    split_years = {parse_integer<int>(key, parts[0]), parse_integer<int>(key, parts[1])};
  } else if (key == "exact_match_uses_references") {
    exact_match_uses_references = parse_bool(key, value);
  } else {
    throw Error(ErrorKind::kConfig, "unknown config key '" + key + "'");
  }
}

EngineConfig EngineConfig::parse(std::string_view text, std::string_view source) {
  EngineConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, std::string(source) + ":" + std::to_string(line_no) +
                                          ": expected 'key = value'");
    }
    try {
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig,
                  std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string EngineConfig::to_text() const {
  std::ostringstream out;
  std::string allow;
  for (const auto& d : enhance.domain_allowlist) allow += (allow.empty() ? "" : ",") + d;
  out << "x = " << fmt_real(enhance.top_word_cut_percent) << '\n'
      << "y = "
      << (enhance.per_reference_cap == kNoReferenceCap ? std::string("inf")
                                                       : std::to_string(enhance.per_reference_cap))
      << '\n'
      << "domain_allowlist = " << allow << '\n'
      << "description_common_cut = " << fmt_real(enhance.description_common_cut) << '\n'
      << "enhance = " << (use_enhancement ? "true" : "false") << '\n'
      << "doc_ngram_max = " << doc_ngram_max << '\n'
      << "label_ngram_max = " << label_ngram_max << '\n'
      << "min_df = " << min_df << '\n'
      << "ir_ngram_max = " << ir_ngram_max << '\n'
      << "K = " << learner.K << '\n'
      << "lambda = " << fmt_real(learner.lambda) << '\n'
      << "negatives_per_doc = " << learner.negatives_per_doc << '\n'
      << "refine_passes = " << learner.refine_passes << '\n'
      << "candidate_cap = " << learner.candidate_cap << '\n'
      << "c = " << cache_size << '\n'
      << "M = " << fmt_real(adjustment.M) << '\n'
      << "i = " << adjustment.i << '\n'
      << "adjust = " << (use_adjustment ? "true" : "false") << '\n'
      << "prewarm_cache = " << (prewarm_cache ? "true" : "false") << '\n'
      << "k = " << k << '\n'
      << "seed = " << seed << '\n'
      << "split = " << (split_mode == SplitMode::kRatio ? "ratio" : "years") << '\n'
      << "split_ratio = " << split_ratio.train << ':' << split_ratio.validation << ':'
      << split_ratio.test << '\n'
      << "split_years = " << split_years.train_last_year << ','
      << split_years.validation_last_year << '\n'
      << "exact_match_uses_references = " << (exact_match_uses_references ? "true" : "false")
      << '\n';
  return out.str();
}

}  // namespace vulnlib
