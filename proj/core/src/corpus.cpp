#include "vulnlib/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"

namespace vulnlib {

using nlohmann::json;

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() < 10) return std::nullopt;
  auto digits = [&](std::size_t from, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = from; i < from + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y},
                                  std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d)};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::int64_t Date::serial() const {
  std::chrono::sys_days days{std::chrono::year{year} / std::chrono::month{month} /
                             std::chrono::day{day}};
  return days.time_since_epoch().count();
}

Date Date::from_serial(std::int64_t days) {
  std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{days}}};
  return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
              static_cast<unsigned>(ymd.day())};
}

std::optional<std::string> url_domain(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos || scheme == 0) return std::nullopt;
  std::string_view rest = url.substr(scheme + 3);
  auto end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority = authority.substr(at + 1);
  if (auto colon = authority.find(':'); colon != std::string_view::npos)
    authority = authority.substr(0, colon);
  if (authority.empty()) return std::nullopt;
  std::string host;
  host.reserve(authority.size());
  for (char c : authority) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (!(std::isalnum(uc) || c == '.' || c == '-' || c == '_')) return std::nullopt;
    host.push_back(static_cast<char>(std::tolower(uc)));
  }
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);
  if (host.empty()) return std::nullopt;
  return host;
}

namespace {

std::string normalize_name_part(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back('_');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

LabelId canonical_label_id(std::string_view raw) {
  return make_label(raw).id;
}

Label make_label(std::string_view raw) {
  Label label;
  std::string_view name_part = raw;
  std::optional<std::string> version;
  if (auto at = raw.find('@'); at != std::string_view::npos) {
    name_part = raw.substr(0, at);
    std::string v = normalize_name_part(trim(raw.substr(at + 1)));
    if (!v.empty()) version = std::move(v);
  }
  label.name = normalize_name_part(trim(name_part));
  if (label.name.empty()) {
    throw Error(ErrorKind::kValidation,
                "label '" + std::string(raw) + "' has an empty library name");
  }
  label.version = version;
  label.id = version ? label.name + "@" + *version : label.name;
  return label;
}

void Dataset::sort_chronologically() {
  std::sort(reports.begin(), reports.end(),
            [](const VulnerabilityReport& a, const VulnerabilityReport& b) {
              if (a.published != b.published) return a.published < b.published;
              return a.id < b.id;
            });
}

void Dataset::validate() const {
  std::set<std::string> ids;
  for (const auto& r : reports) {
    if (r.id.empty()) throw Error(ErrorKind::kValidation, "report with empty id");
    if (!ids.insert(r.id).second)
      throw Error(ErrorKind::kValidation, "duplicate report id " + r.id);
    for (const auto& l : r.labels) {
      if (!labels.count(l))
        throw Error(ErrorKind::kValidation,
                    "report " + r.id + " references unknown label " + l);
    }
  }
}

namespace {

[[noreturn]] void parse_fail(std::string_view source, std::size_t line,
                             const std::string& why) {
  throw Error(ErrorKind::kParse, std::string(source) + ":" +
                                     std::to_string(line) + ": " + why);
}

VulnerabilityReport parse_report(const json& j, std::string_view source,
                                 std::size_t line) {
  if (!j.is_object()) parse_fail(source, line, "record is not a JSON object");
  VulnerabilityReport r;
  try {
    if (!j.contains("id") || !j["id"].is_string())
      parse_fail(source, line, "missing string field 'id'");
    r.id = j["id"].get<std::string>();
    if (r.id.empty()) parse_fail(source, line, "empty 'id'");
    if (!j.contains("published") || j["published"].is_null()) {
      throw Error(ErrorKind::kValidation, std::string(source) + ":" +
                                              std::to_string(line) + ": report " +
                                              r.id + " has no published date");
    }
    auto date = Date::parse(j["published"].get<std::string>());
    if (!date) {
      throw Error(ErrorKind::kValidation,
                  std::string(source) + ":" + std::to_string(line) +
                      ": report " + r.id + " has an invalid published date");
    }
    r.published = *date;
    r.description = j.value("description", std::string{});
    if (j.contains("references")) {
      for (const auto& ref : j["references"]) {
        ReferenceDoc doc;
        if (ref.is_string()) {
          doc.url = ref.get<std::string>();
        } else {
          doc.url = ref.value("url", std::string{});
          if (ref.contains("title") && ref["title"].is_string())
            doc.title = ref["title"].get<std::string>();
          if (ref.contains("text") && ref["text"].is_string())
            doc.text = ref["text"].get<std::string>();
        }
        doc.domain = url_domain(doc.url).value_or("");
        r.references.push_back(std::move(doc));
      }
    }
    if (j.contains("cpe")) {
      for (const auto& c : j["cpe"]) r.cpe_entries.push_back(c.get<std::string>());
    }
    if (j.contains("labels")) {
      for (const auto& l : j["labels"]) {
        r.labels.insert(canonical_label_id(l.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    parse_fail(source, line, e.what());
  }
  return r;
}

}  // namespace

Dataset parse_dataset(std::string_view jsonl, LoadMode mode,
                      std::string_view source) {
  Dataset ds;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) parse_fail(source, line_no, "malformed JSON");
    VulnerabilityReport r = parse_report(j, source, line_no);
    if (!ids.insert(r.id).second) {
      throw Error(ErrorKind::kValidation, std::string(source) + ":" +
                                              std::to_string(line_no) +
                                              ": duplicate report id " + r.id);
    }
    if (mode == LoadMode::kLabeled && r.labels.empty()) {
      throw Error(ErrorKind::kValidation,
                  std::string(source) + ":" + std::to_string(line_no) +
                      ": report " + r.id + " has no labels (labeled mode)");
    }
    for (const auto& l : r.labels) {
      if (!ds.labels.count(l)) ds.labels.emplace(l, make_label(l));
    }
    ds.reports.push_back(std::move(r));
  }
  ds.sort_chronologically();
  return ds;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << data;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, LoadMode mode,
                     const std::optional<std::filesystem::path>& label_universe_path) {
  Dataset ds = parse_dataset(read_file(path), mode, path.string());
  if (label_universe_path) {
    std::istringstream in(read_file(*label_universe_path));
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      Label l = make_label(line);
      ds.labels.emplace(l.id, std::move(l));
    }
  }
  return ds;
}

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& r : dataset.reports) {
    json j;
    j["id"] = r.id;
    j["published"] = r.published.to_string();
    j["description"] = r.description;
    json refs = json::array();
    for (const auto& ref : r.references) {
      json o;
      o["url"] = ref.url;
      if (ref.title) o["title"] = *ref.title;
      if (ref.text) o["text"] = *ref.text;
      refs.push_back(std::move(o));
    }
    j["references"] = std::move(refs);
    j["cpe"] = r.cpe_entries;
    j["labels"] = json(std::vector<std::string>(r.labels.begin(), r.labels.end()));
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  write_file(path, dataset_to_jsonl(dataset));
}

void write_label_universe(const Dataset& dataset,
                          const std::filesystem::path& path) {
  std::string out;
  for (const auto& [id, _] : dataset.labels) out += id + "\n";
  write_file(path, out);
}

namespace {

Dataset subset(const Dataset& source, std::size_t begin, std::size_t end) {
  Dataset d;
  d.reports.assign(source.reports.begin() + static_cast<std::ptrdiff_t>(begin),
                   source.reports.begin() + static_cast<std::ptrdiff_t>(end));
  d.labels = source.labels;
  return d;
}

std::size_t extend_past_ties(const std::vector<VulnerabilityReport>& r,
                             std::size_t cut) {
  if (cut == 0) return 0;
  while (cut < r.size() && r[cut].published == r[cut - 1].published) ++cut;
  return cut;
}

Dataset sorted_copy(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorKind::kValidation, "cannot split an empty dataset");
  Dataset sorted = dataset;
  sorted.sort_chronologically();
  return sorted;
}

}  // namespace

ChronoSplit chronological_split(const Dataset& dataset, SplitRatio ratio) {
  Dataset sorted = sorted_copy(dataset);
  const std::size_t total_parts = ratio.train + ratio.validation + ratio.test;
  if (total_parts == 0) throw Error(ErrorKind::kConfig, "split ratio sums to zero");
  const std::size_t n = sorted.size();
  std::size_t cut1 = n * ratio.train / total_parts;
  std::size_t cut2 = n * (ratio.train + ratio.validation) / total_parts;
  std::size_t ext1 = extend_past_ties(sorted.reports, cut1);
  std::size_t ext2 = std::max(ext1, extend_past_ties(sorted.reports, cut2));
  if (ext1 != cut1 || ext2 != cut2) {
    log::warn("split boundary fell inside a same-date run; moved " +
              std::to_string((ext1 - cut1) + (ext2 - cut2)) +
              " report(s) into the earlier split");
  }
  ChronoSplit split{subset(sorted, 0, ext1), subset(sorted, ext1, ext2),
                    subset(sorted, ext2, n)};
  if (split.validation.empty() || split.test.empty()) {
    log::warn("chronological split produced an empty validation or test set");
  }
  return split;
}

ChronoSplit chronological_split(const Dataset& dataset, YearBoundaries years) {
  if (years.validation_last_year < years.train_last_year)
    throw Error(ErrorKind::kConfig, "validation year boundary precedes train boundary");
  Dataset sorted = sorted_copy(dataset);
  auto first_after = [&](int year) {
    return static_cast<std::size_t>(
        std::find_if(sorted.reports.begin(), sorted.reports.end(),
                     [&](const VulnerabilityReport& r) { return r.published.year > year; }) -
        sorted.reports.begin());
  };
  std::size_t cut1 = first_after(years.train_last_year);
  std::size_t cut2 = first_after(years.validation_last_year);
  return ChronoSplit{subset(sorted, 0, cut1), subset(sorted, cut1, cut2),
                     subset(sorted, cut2, sorted.size())};
}

CensusReport unseen_census(const ChronoSplit& split, CensusGranularity granularity) {
  // Ordered periods, each a list of report pointers.
  std::vector<std::pair<std::string, std::vector<const VulnerabilityReport*>>> periods;
  if (granularity == CensusGranularity::kPerSplit) {
    const std::pair<const char*, const Dataset*> parts[] = {
        {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
    for (const auto& [name, ds] : parts) {
      std::vector<const VulnerabilityReport*> rs;
      for (const auto& r : ds->reports) rs.push_back(&r);
      periods.emplace_back(name, std::move(rs));
    }
  } else {
    std::map<int, std::vector<const VulnerabilityReport*>> by_year;
    for (const Dataset* ds : {&split.train, &split.validation, &split.test})
      for (const auto& r : ds->reports) by_year[r.published.year].push_back(&r);
    for (auto& [year, rs] : by_year) periods.emplace_back(std::to_string(year), std::move(rs));
  }

  CensusReport report;
  report.granularity = granularity;
  std::set<LabelId> earlier;
  for (const auto& [name, rs] : periods) {
    PeriodCensus pc;
    pc.period = name;
    std::set<LabelId> here;
    for (const auto* r : rs) {
      if (r->labels.empty()) continue;
      ++pc.total_reports;
      std::size_t unseen = 0;
      for (const auto& l : r->labels) {
        here.insert(l);
        if (!earlier.count(l)) ++unseen;
      }
      if (unseen == 0) ++pc.seen_only_reports;
      if (unseen > 0) ++pc.any_unseen_reports;
      if (unseen == r->labels.size()) ++pc.full_unseen_reports;
    }
    pc.total_labels = here.size();
    for (const auto& l : here) {
      if (earlier.count(l)) ++pc.seen_labels; else ++pc.unseen_labels;
    }
    earlier.insert(here.begin(), here.end());
    report.periods.push_back(std::move(pc));
  }
  return report;
}

namespace {

std::string percent(std::size_t part, std::size_t whole) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%",
                whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole));
  return buf;
}

}  // namespace

std::string CensusReport::to_table() const {
  std::ostringstream out;
  out << (granularity == CensusGranularity::kPerYear ? "year" : "split")
      << "\tlabels\tseen\tunseen\treports\tseen_only\tfull_unseen\tany_unseen\n";
  for (const auto& p : periods) {
    out << p.period << '\t' << p.total_labels << '\t' << p.seen_labels << " ("
        << percent(p.seen_labels, p.total_labels) << ")\t" << p.unseen_labels << " ("
        << percent(p.unseen_labels, p.total_labels) << ")\t" << p.total_reports << '\t'
        << p.seen_only_reports << " (" << percent(p.seen_only_reports, p.total_reports)
        << ")\t" << p.full_unseen_reports << " ("
        << percent(p.full_unseen_reports, p.total_reports) << ")\t"
        << p.any_unseen_reports << " (" << percent(p.any_unseen_reports, p.total_reports)
        << ")\n";
  }
  return out.str();
}

std::string CensusReport::to_json() const {
  json j;
  j["granularity"] = granularity == CensusGranularity::kPerYear ? "year" : "split";
  j["periods"] = json::array();
  for (const auto& p : periods) {
    j["periods"].push_back({{"period", p.period},
                            {"total_labels", p.total_labels},
                            {"seen_labels", p.seen_labels},
                            {"unseen_labels", p.unseen_labels},
                            {"total_reports", p.total_reports},
                            {"seen_only_reports", p.seen_only_reports},
                            {"full_unseen_reports", p.full_unseen_reports},
                            {"any_unseen_reports", p.any_unseen_reports}});
  }
  return j.dump(2) + "\n";
}

}  // namespace vulnlib
