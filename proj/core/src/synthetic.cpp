#include "vulnlib/synthetic.hpp"

#include <algorithm>
#include <random>

#include "vulnlib/error.hpp"

namespace vulnlib {
namespace {

constexpr const char* kPrefixes[] = {"xml",  "json",  "yaml", "image", "pdf",  "zip",
                                     "http", "crypto", "sql", "font",  "video", "mail"};
constexpr const char* kSuffixes[] = {"parser", "reader", "codec", "render",
                                     "client", "server", "archive", "toolkit"};

constexpr const char* kFlaws[] = {"heap buffer overflow", "use after free", "integer overflow",
                                  "out of bounds read", "null pointer dereference",
                                  "infinite loop", "stack exhaustion", "double free"};
constexpr const char* kImpacts[] = {"cause a denial of service", "execute arbitrary code",
                                    "obtain sensitive information", "crash the process",
                                    "corrupt memory"};
constexpr const char* kVectors[] = {"a crafted file", "a malformed request", "a long input string",
                                    "a specially crafted document", "nested elements"};
constexpr const char* kInformative[] = {"github.com", "bugzilla.redhat.com", "lists.debian.org",
                                        "openwall.com", "usn.ubuntu.com"};
constexpr const char* kMisleading[] = {"blog.example.net", "news.example.org", "forum.example.com"};
constexpr const char* kNoise[] = {"commit", "patch", "upstream", "release", "fixed", "reported",
                                  "maintainer", "merged", "backport", "changelog"};

struct Library {
  std::string name;
  std::string prefix;
  std::string suffix;
  bool late = false;
  int major = 1;
  int minor = 0;
  std::string version() const { return std::to_string(major) + "." + std::to_string(minor); }
};

struct Burst {
  std::size_t lib = 0;
  std::size_t remaining = 0;
};

template <typename T, std::size_t N>
const T& pick(const T (&arr)[N], std::mt19937_64& rng) {
  return arr[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

}  // namespace

Dataset generate_synthetic(const SyntheticOptions& opts) {
  if (opts.n_reports == 0) throw Error(ErrorKind::kValidation, "n_reports must be positive");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Every prefix/suffix pair is a library. A hyphenated spelling for the
  // first pairing of each sub-word keeps both pieces in the dictionary;
  // the rest are written as one word.
  std::vector<Library> libs;
  std::set<std::string> prefix_seen, suffix_seen;
  for (std::size_t p = 0; p < std::size(kPrefixes); ++p) {
    for (std::size_t s = 0; s < std::size(kSuffixes); ++s) {
      if ((p + s) % 3 != 0) continue;
      Library lib;
      lib.prefix = kPrefixes[p];
      lib.suffix = kSuffixes[s];
      bool hyphen = !prefix_seen.count(lib.prefix) || !suffix_seen.count(lib.suffix);
      lib.name = hyphen ? lib.prefix + "-" + lib.suffix : lib.prefix + lib.suffix;
      prefix_seen.insert(lib.prefix);
      suffix_seen.insert(lib.suffix);
      libs.push_back(lib);
    }
  }
  // Late libraries are concatenated names, so their sub-words are shared
  // with libraries seen earlier.
  std::vector<std::size_t> concat;
  for (std::size_t i = 0; i < libs.size(); ++i)
    if (libs[i].name.find('-') == std::string::npos) concat.push_back(i);
  std::shuffle(concat.begin(), concat.end(), rng);
  for (std::size_t j = 0; j < concat.size() / 3; ++j) libs[concat[j]].late = true;

  const std::size_t late_start = static_cast<std::size_t>(opts.late_library_start * opts.n_reports);
  // Every early library appears once before any repeats, so each sub-word
  // reaches the training split.
  std::vector<std::size_t> intro;
  for (std::size_t i = 0; i < libs.size(); ++i)
    if (!libs[i].late) intro.push_back(i);
  std::shuffle(intro.begin(), intro.end(), rng);
  auto new_burst = [&](std::size_t position) {
    if (!intro.empty()) {
      std::size_t lib = intro.back();
      intro.pop_back();
      return Burst{lib, std::uniform_int_distribution<std::size_t>(3, 5)(rng)};
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < libs.size(); ++i)
      if (position >= late_start || !libs[i].late) pool.push_back(i);
    std::size_t lib = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    if (position >= late_start && unit(rng) < 0.5) {
      std::vector<std::size_t> late;
      for (std::size_t i : pool)
        if (libs[i].late) late.push_back(i);
      if (!late.empty()) lib = late[std::uniform_int_distribution<std::size_t>(0, late.size() - 1)(rng)];
    }
    // A new burst usually ships against a newer release.
    Library& l = libs[lib];
    if (unit(rng) < 0.7) {
      if (unit(rng) < 0.25) {
        ++l.major;
        l.minor = 0;
      } else {
        ++l.minor;
      }
    }
    return Burst{lib, std::uniform_int_distribution<std::size_t>(3, 7)(rng)};
  };

  // Page chrome shared by every fetched reference: the most frequent words
  // of the reference corpus, which is what the top-x% pruning removes.
  std::vector<std::string> chrome;
  {
    static constexpr const char* kOnsets[] = {"b", "d", "g", "k", "l", "m", "n", "p", "r", "t"};
    static constexpr const char* kVowels[] = {"a", "i", "o", "u"};
    for (const char* o1 : kOnsets)
      for (const char* v1 : kVowels)
        for (const char* o2 : {"s", "v", "z", "n"})
          chrome.push_back(std::string(o1) + v1 + o2 + v1 + "x");
  }

  std::vector<Burst> bursts;
  for (std::size_t b = 0; b < opts.concurrent_bursts; ++b) bursts.push_back(new_burst(0));

  Dataset d;
  std::int64_t day = opts.start.serial();
  for (std::size_t n = 0; n < opts.n_reports; ++n) {
    std::size_t slot = std::uniform_int_distribution<std::size_t>(0, bursts.size() - 1)(rng);
    if (bursts[slot].remaining == 0) bursts[slot] = new_burst(n);
    Burst& burst = bursts[slot];
    --burst.remaining;
    const Library& lib = libs[burst.lib];

    VulnerabilityReport r;
    char id[32];
    std::snprintf(id, sizeof id, "SYN-%04zu", n + 1);
    r.id = id;
    r.published = Date::from_serial(day);
    day += static_cast<std::int64_t>(opts.days_between);

    std::string flaw = pick(kFlaws, rng);
    std::string mention;
    bool omit = unit(rng) < opts.omit_library;
    if (!omit) mention = unit(rng) < 0.5 ? lib.prefix + " " + lib.suffix : lib.name;
    r.description = "A " + flaw + " in " + (omit ? std::string("a widely used component") : mention) +
                    " allows remote attackers to " + pick(kImpacts, rng) + " via " +
                    pick(kVectors, rng) + ".";

    std::string domain = pick(kInformative, rng);
    ReferenceDoc good;
    good.url = "https://" + domain + "/" + lib.name + "/issues/" + std::to_string(n + 100);
    good.domain = domain;
    good.title = lib.name + ": " + flaw;
    std::string body = "The " + lib.prefix + " " + lib.suffix + " module of " + lib.name + " has a " +
                       flaw + ".";
    for (int w = 0; w < 4; ++w) body += std::string(" ") + pick(kNoise, rng);
    for (int w = 0; w < 60; ++w)
      body += " " + chrome[std::uniform_int_distribution<std::size_t>(0, chrome.size() - 1)(rng)];
    good.text = body;
    r.references.push_back(good);

    if (unit(rng) < 0.6) {
      const Library& other = libs[std::uniform_int_distribution<std::size_t>(0, libs.size() - 1)(rng)];
      std::string mdomain = pick(kMisleading, rng);
      ReferenceDoc bad;
      bad.url = "https://" + mdomain + "/post/" + std::to_string(n);
      bad.domain = mdomain;
      bad.title = "Roundup: " + other.name + " and friends";
      bad.text = other.prefix + " " + other.suffix + " " + other.name + " " + other.name + " " +
                 pick(kNoise, rng);
      r.references.push_back(bad);
    }
    if (unit(rng) < 0.5)
      r.cpe_entries.push_back("cpe:2.3:a:" + lib.prefix + "project:" + lib.name + ":" + lib.version() +
                              ":*:*:*:*:*:*:*");
    r.labels.insert(canonical_label_id(lib.name + "@" + lib.version()));
    for (const auto& l : r.labels) d.labels.emplace(l, make_label(l));
    d.reports.push_back(std::move(r));
  }
  d.sort_chronologically();
  return d;
}

}  // namespace vulnlib
