#include "vulnlib/temporal.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "vulnlib/error.hpp"

namespace vulnlib {
namespace {

struct SplitId {
  std::string_view name;
  std::optional<std::string_view> version;
};

SplitId split_id(std::string_view id) {
  auto at = id.find('@');
  if (at == std::string_view::npos) return {id, std::nullopt};
  return {id.substr(0, at), id.substr(at + 1)};
}

std::vector<std::string_view> components(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto dot = v.find('.', start);
    out.push_back(v.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::strong_ordering compare_component(std::string_view a, std::string_view b) {
  if (all_digits(a) && all_digits(b)) {
    auto strip = [](std::string_view s) {
      std::size_t z = 0;
      while (z + 1 < s.size() && s[z] == '0') ++z;
      return s.substr(z);
    };
    a = strip(a);
    b = strip(b);
    if (a.size() != b.size()) return a.size() <=> b.size();
  }
  int c = a.compare(b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace

std::strong_ordering compare_versions(std::string_view a, std::string_view b) {
  SplitId x = split_id(a), y = split_id(b);
  if (x.name != y.name) {
    throw Error(ErrorKind::kValidation, "cannot compare versions of different libraries: " +
                                            std::string(a) + " vs " + std::string(b));
  }
  if (!x.version && !y.version) return std::strong_ordering::equal;
  if (!x.version) return std::strong_ordering::less;
  if (!y.version) return std::strong_ordering::greater;
  auto ca = components(*x.version), cb = components(*y.version);
  std::size_t n = std::max(ca.size(), cb.size());
  for (std::size_t k = 0; k < n; ++k) {
    std::string_view pa = k < ca.size() ? ca[k] : std::string_view("0");
    std::string_view pb = k < cb.size() ? cb[k] : std::string_view("0");
    auto c = compare_component(pa, pb);
    if (c != 0) return c;
  }
  return std::strong_ordering::equal;
}

VersionStore VersionStore::build(const std::map<LabelId, Label>& universe) {
  std::map<std::string, std::vector<LabelId>> by_name;
  for (const auto& [id, label] : universe) by_name[label.name].push_back(id);
  VersionStore store;
  for (auto& [name, ids] : by_name) {
    if (ids.size() < 2) continue;
    // Newest first; equal versions fall back to the id so the order is total.
    std::sort(ids.begin(), ids.end(), [](const LabelId& x, const LabelId& y) {
      auto c = compare_versions(x, y);
      if (c != 0) return c > 0;
      return x < y;
    });
    for (std::size_t k = 1; k < ids.size(); ++k) {
      std::vector<LabelId> newer;
      for (std::size_t m = 0; m < k; ++m)
        if (compare_versions(ids[m], ids[k]) > 0) newer.push_back(ids[m]);
      if (!newer.empty()) store.newer_.emplace(ids[k], std::move(newer));
    }
  }
  return store;
}

const std::vector<LabelId>& VersionStore::newer_versions(const LabelId& label) const {
  static const std::vector<LabelId> none;
  auto it = newer_.find(label);
  return it == newer_.end() ? none : it->second;
}

LruCache::LruCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorKind::kConfig, "cache capacity must be positive");
  order_.reserve(capacity_ + 1);
}

std::optional<LabelId> LruCache::insert(const LabelId& label) {
  auto it = std::find(order_.begin(), order_.end(), label);
  if (it != order_.end()) {
    std::rotate(order_.begin(), it, it + 1);
    return std::nullopt;
  }
  order_.insert(order_.begin(), label);
  if (order_.size() > capacity_) {
    LabelId evicted = std::move(order_.back());
    order_.pop_back();
    return evicted;
  }
  return std::nullopt;
}

bool LruCache::contains(const LabelId& label) const { return recency(label).has_value(); }

std::optional<std::size_t> LruCache::recency(const LabelId& label) const {
  auto it = std::find(order_.begin(), order_.end(), label);
  if (it == order_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - order_.begin());
}

std::string LruCache::to_json() const {
  nlohmann::json j;
  j["capacity"] = capacity_;
  j["entries"] = order_;
  return j.dump();
}

LruCache LruCache::from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("capacity") || !j.contains("entries"))
    throw Error(ErrorKind::kParse, "cache state: expected {capacity, entries}");
  LruCache cache(j["capacity"].get<std::size_t>());
  auto entries = j["entries"].get<std::vector<LabelId>>();
  if (entries.size() > cache.capacity_)
    throw Error(ErrorKind::kValidation, "cache state holds more entries than its capacity");
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) cache.insert(*it);
  if (cache.order_ != entries) throw Error(ErrorKind::kValidation, "cache state has duplicate entries");
  return cache;
}

void insert_ground_truth(LruCache& cache, const std::set<LabelId>& labels) {
  std::vector<LabelId> versioned, plain;
  for (const auto& l : labels) (l.find('@') != std::string::npos ? versioned : plain).push_back(l);
  for (const auto& l : versioned) cache.insert(l);
  for (const auto& l : plain) cache.insert(l);
}

void AdjustmentParams::validate() const {
  if (!(M > 0.0)) throw Error(ErrorKind::kConfig, "M must be positive");
  if (i == 0) throw Error(ErrorKind::kConfig, "i must be at least 1");
}

void favor_new_version(std::vector<AdjustedLabel>& working, std::size_t window,
                       const VersionStore& store, const LruCache& cache,
                       const ScoreLookup& lookup) {
  window = std::min(window, working.size());
  // Snapshot of the window's labels; transfers may append to `working`.
  std::vector<LabelId> top;
  for (std::size_t k = 0; k < window; ++k) top.push_back(working[k].label);
  auto find = [&](const LabelId& id) {
    return std::find_if(working.begin(), working.end(),
                        [&](const AdjustedLabel& a) { return a.label == id; });
  };
  for (const auto& old_id : top) {
    for (const auto& new_id : store.newer_versions(old_id)) {
      if (!cache.contains(new_id)) continue;
      double old_score = find(old_id)->score;
      auto it = find(new_id);
      if (it == working.end()) {
        AdjustedLabel added;
        added.label = new_id;
        std::optional<double> known = lookup ? lookup(new_id) : std::nullopt;
        added.base_score = added.score = known.value_or(old_score);
        working.push_back(std::move(added));
        it = working.end() - 1;
      }
      it->score = std::max(it->score, old_score);
      it->version_transferred = true;
      auto old_it = find(old_id);
      old_it->score = 0.0;
      old_it->transferred_to = new_id;
      break;
    }
  }
}

double mean_top_scores(const std::vector<AdjustedLabel>& working, std::size_t i) {
  std::vector<double> scores;
  scores.reserve(working.size());
  for (const auto& a : working) scores.push_back(a.score);
  std::size_t n = std::min(i, scores.size());
  if (n == 0) return 0.0;
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(n), scores.end(),
                    std::greater<>());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += scores[k];
  return sum / static_cast<double>(n);
}

void recency_boost(std::vector<AdjustedLabel>& working, const LruCache& cache,
                   const AdjustmentParams& params, double mean_score) {
  for (auto& a : working) {
    auto rec = cache.recency(a.label);
    a.in_cache = rec.has_value();
    a.recency = rec;
    if (!rec) continue;
    double alpha = params.M / (static_cast<double>(*rec) + 1.0);
    a.score += alpha * mean_score;
  }
}

namespace {

void sort_ranking(std::vector<AdjustedLabel>& v) {
  std::sort(v.begin(), v.end(), [](const AdjustedLabel& a, const AdjustedLabel& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.label < b.label;
  });
}

}  // namespace

std::vector<AdjustedLabel> adjust(const std::vector<ScoredLabel>& top_i, const VersionStore& store,
                                  const LruCache& cache, const AdjustmentParams& params,
                                  const ScoreLookup& lookup) {
  std::vector<AdjustedLabel> working;
  working.reserve(top_i.size() + 4);
  for (const auto& s : top_i) {
    AdjustedLabel a;
    a.label = s.label;
    a.score = a.base_score = s.score;
    working.push_back(std::move(a));
  }
  favor_new_version(working, working.size(), store, cache, lookup);
  double mean = mean_top_scores(working, params.i);
  recency_boost(working, cache, params, mean);
  sort_ranking(working);
  return working;
}

std::vector<AdjustedLabel> unadjusted(const std::vector<ScoredLabel>& ranked, const LruCache& cache) {
  std::vector<AdjustedLabel> out;
  out.reserve(ranked.size());
  for (const auto& s : ranked) {
    AdjustedLabel a;
    a.label = s.label;
    a.score = a.base_score = s.score;
    a.recency = cache.recency(s.label);
    a.in_cache = a.recency.has_value();
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace vulnlib
