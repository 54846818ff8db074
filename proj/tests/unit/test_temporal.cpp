#include <gtest/gtest.h>

#include <algorithm>
#include <list>
#include <cstring>
#include <random>

#include "vulnlib/error.hpp"
#include "vulnlib/temporal.hpp"

using namespace vulnlib;

namespace {

std::map<LabelId, Label> universe_of(std::initializer_list<const char*> ids) {
  std::map<LabelId, Label> u;
  for (const char* id : ids) u.emplace(id, make_label(id));
  return u;
}

LruCache cache_of(std::initializer_list<const char*> oldest_first, std::size_t cap = 10) {
  LruCache c(cap);
  for (const char* l : oldest_first) c.insert(l);
  return c;
}

AdjustedLabel row(const char* label, double score) {
  AdjustedLabel a;
  a.label = label;
  a.score = a.base_score = score;
  return a;
}

double score_of(const std::vector<AdjustedLabel>& v, const std::string& label) {
  for (const auto& a : v)
    if (a.label == label) return a.score;
  ADD_FAILURE() << "missing " << label;
  return -1;
}

}  // namespace

TEST(Versions, Compare) {
  EXPECT_EQ(compare_versions("lib@1.10", "lib@1.9"), std::strong_ordering::greater);
  EXPECT_EQ(compare_versions("lib@2.0", "lib@2.0.0"), std::strong_ordering::equal);
  EXPECT_EQ(compare_versions("lib", "lib@0.1"), std::strong_ordering::less);
  EXPECT_EQ(compare_versions("lib@1.0b", "lib@1.0a"), std::strong_ordering::greater);
  EXPECT_THROW(compare_versions("a@1", "b@1"), Error);
}

TEST(Versions, StoreNewestFirst) {
  auto store = VersionStore::build(universe_of({"lib@1.9", "lib@1.10", "lib@2.0", "lib", "other@1"}));
  EXPECT_EQ(store.newer_versions("lib@1.9"), (std::vector<LabelId>{"lib@2.0", "lib@1.10"}));
  EXPECT_EQ(store.newer_versions("lib"), (std::vector<LabelId>{"lib@2.0", "lib@1.10", "lib@1.9"}));
  EXPECT_TRUE(store.newer_versions("lib@2.0").empty());
  EXPECT_TRUE(store.newer_versions("unknown").empty());
  EXPECT_TRUE(store.newer_versions("other@1").empty());
}

TEST(Lru, Trace) {
  LruCache c(2);
  EXPECT_FALSE(c.insert("a"));
  EXPECT_FALSE(c.insert("b"));
  EXPECT_EQ(c.insert("c"), "a");
  EXPECT_EQ(c.entries(), (std::vector<LabelId>{"c", "b"}));
  EXPECT_FALSE(c.insert("b"));
  EXPECT_EQ(c.entries(), (std::vector<LabelId>{"b", "c"}));
  EXPECT_EQ(c.recency("c"), 1u);
  EXPECT_FALSE(c.recency("a"));
  EXPECT_EQ(LruCache().capacity(), 300u);
}

TEST(Lru, MatchesListOracle) {
  std::mt19937_64 rng(17);
  for (std::size_t cap : {1u, 2u, 5u, 13u}) {
    LruCache c(cap);
    std::list<std::string> oracle;
    for (int op = 0; op < 3000; ++op) {
      std::string label = "l" + std::to_string(rng() % 20);
      if (rng() % 4 == 0) {
        bool present = std::find(oracle.begin(), oracle.end(), label) != oracle.end();
        EXPECT_EQ(c.contains(label), present);
        continue;
      }
      std::optional<std::string> evicted;
      oracle.remove(label);
      oracle.push_front(label);
      if (oracle.size() > cap) {
        evicted = oracle.back();
        oracle.pop_back();
      }
      EXPECT_EQ(c.insert(label), evicted);
      ASSERT_EQ(c.entries(), std::vector<std::string>(oracle.begin(), oracle.end()));
      for (std::size_t r = 0; r < c.size(); ++r) EXPECT_EQ(c.recency(c.entries()[r]), r);
    }
  }
}

TEST(Lru, JsonRoundTrip) {
  LruCache c = cache_of({"a", "b@1", "c"}, 7);
  LruCache back = LruCache::from_json(c.to_json());
  EXPECT_EQ(back, c);
  EXPECT_THROW(LruCache::from_json("[1,2"), Error);
}

TEST(Lru, GroundTruthOrder) {
  LruCache c(10);
  insert_ground_truth(c, {"b", "a@1", "c@2", "a"});
  // versioned first (a@1, c@2), then unversioned (a, b); last ends at front
  EXPECT_EQ(c.entries(), (std::vector<LabelId>{"b", "a", "c@2", "a@1"}));
}

TEST(Favor, TransfersAndZeroes) {
  auto store = VersionStore::build(universe_of({"lib@1.0", "lib@2.0"}));
  LruCache cache = cache_of({"lib@2.0"});
  std::vector<AdjustedLabel> w{row("lib@1.0", 0.9), row("lib@2.0", 0.2)};
  favor_new_version(w, 2, store, cache);
  EXPECT_EQ(score_of(w, "lib@2.0"), 0.9);
  EXPECT_EQ(score_of(w, "lib@1.0"), 0.0);
}

TEST(Favor, EmptyCacheUnchanged) {
  auto store = VersionStore::build(universe_of({"lib@1.0", "lib@2.0"}));
  std::vector<AdjustedLabel> w{row("lib@1.0", 0.9), row("lib@2.0", 0.2)};
  auto before = w;
  favor_new_version(w, 2, store, LruCache(5));
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w[i].score, before[i].score);
}

TEST(Favor, MaxBranch) {
  auto store = VersionStore::build(universe_of({"lib@1.0", "lib@2.0"}));
  std::vector<AdjustedLabel> w{row("lib@2.0", 0.95), row("lib@1.0", 0.9)};
  favor_new_version(w, 2, store, cache_of({"lib@2.0"}));
  EXPECT_EQ(score_of(w, "lib@2.0"), 0.95);
  EXPECT_EQ(score_of(w, "lib@1.0"), 0.0);
}

TEST(Favor, AbsentTargetIsCreatedFromLookup) {
  auto store = VersionStore::build(universe_of({"lib@1.0", "lib@2.0"}));
  std::vector<AdjustedLabel> w{row("lib@1.0", 0.4)};
  favor_new_version(w, 1, store, cache_of({"lib@2.0"}),
                    [](const LabelId& l) -> std::optional<double> {
                      return l == "lib@2.0" ? std::optional(0.1) : std::nullopt;
                    });
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(score_of(w, "lib@2.0"), 0.4);
  EXPECT_EQ(score_of(w, "lib@1.0"), 0.0);
}

TEST(Favor, FirstResidentNewerWinsAndNoCascade) {
  auto store = VersionStore::build(universe_of({"lib@1", "lib@2", "lib@3"}));
  std::vector<AdjustedLabel> w{row("lib@1", 0.8), row("lib@2", 0.1), row("lib@3", 0.05)};
  favor_new_version(w, 3, store, cache_of({"lib@2"}));
  EXPECT_EQ(score_of(w, "lib@2"), 0.8);
  EXPECT_EQ(score_of(w, "lib@3"), 0.05);
  EXPECT_EQ(score_of(w, "lib@1"), 0.0);
}

TEST(Favor, ConservesPairMaximaRandomized) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  auto universe = universe_of({"a@1", "a@2", "b@1", "b@2", "c@1", "c@2"});
  auto store = VersionStore::build(universe);
  for (int t = 0; t < 200; ++t) {
    std::vector<AdjustedLabel> w;
    for (const auto& [id, l] : universe) w.push_back(row(id.c_str(), u(rng)));
    LruCache cache(10);
    for (const char* n : {"a@2", "b@2", "c@2"})
      if (rng() % 2) cache.insert(n);
    auto before = w;
    favor_new_version(w, w.size(), store, cache);
    for (const char* lib : {"a", "b", "c"}) {
      std::string old = std::string(lib) + "@1", neu = std::string(lib) + "@2";
      if (!cache.contains(neu)) continue;
      EXPECT_EQ(score_of(w, neu), std::max(score_of(before, old), score_of(before, neu)));
      EXPECT_EQ(score_of(w, old), 0.0);
    }
  }
}

TEST(Boost, Arithmetic) {
  AdjustmentParams p;
  std::vector<AdjustedLabel> w{row("x", 0.5)};
  recency_boost(w, cache_of({"x"}), p, 0.1);
  EXPECT_DOUBLE_EQ(w[0].score, 0.5 + 8.0 * 0.1);

  std::vector<AdjustedLabel> w3{row("x", 0.5)};
  recency_boost(w3, cache_of({"x", "a", "b", "c"}), p, 0.1);
  EXPECT_DOUBLE_EQ(w3[0].score, 0.5 + 2.0 * 0.1);
}

TEST(Boost, NonResidentBitIdentical) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<AdjustedLabel> w;
    for (int i = 0; i < 8; ++i) w.push_back(row(("l" + std::to_string(i)).c_str(), u(rng)));
    LruCache cache(4);
    for (int i = 0; i < 3; ++i) cache.insert("l" + std::to_string(rng() % 8));
    auto before = w;
    recency_boost(w, cache, AdjustmentParams{}, 0.3);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (cache.contains(w[i].label)) {
        EXPECT_GT(w[i].score, before[i].score);
      } else {
        EXPECT_EQ(std::memcmp(&w[i].score, &before[i].score, sizeof(double)), 0);
      }
    }
  }
}

TEST(Boost, AlphaDecreasesWithRecency) {
  LruCache cache = cache_of({"c", "b", "a"});
  std::vector<AdjustedLabel> w{row("a", 0), row("b", 0), row("c", 0)};
  recency_boost(w, cache, AdjustmentParams{}, 1.0);
  EXPECT_GT(w[0].score, w[1].score);
  EXPECT_GT(w[1].score, w[2].score);
}

TEST(Adjust, EmptyStateIsIdentity) {
  std::vector<ScoredLabel> top{{"a", 0.5}, {"b", 0.4}, {"c", 0.1}};
  auto out = adjust(top, VersionStore{}, LruCache(5), AdjustmentParams{});
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].label, top[i].label);
    EXPECT_EQ(out[i].score, top[i].score);
  }
}

TEST(Adjust, SingleResidentBoostedOnce) {
  std::vector<ScoredLabel> top{{"a", 0.5}};
  auto out = adjust(top, VersionStore{}, cache_of({"a"}), AdjustmentParams{});
  EXPECT_DOUBLE_EQ(out[0].score, 0.5 + 8.0 * 0.5);
}

TEST(Adjust, HandExecutedTrace) {
  // cache front: lib@2.0 (recency 0), other (recency 1)
  auto store = VersionStore::build(universe_of({"lib@1.0", "lib@2.0", "other"}));
  LruCache cache = cache_of({"other", "lib@2.0"});
  std::vector<ScoredLabel> top{{"lib@1.0", 0.5}, {"other", 0.25}, {"lib@2.0", 0.125}};
  auto out = adjust(top, store, cache, AdjustmentParams{8.0, 10});
  // transfer: lib@2.0 = max(0.125, 0.5) = 0.5, lib@1.0 = 0
  // mean = (0.5 + 0.25 + 0) / 3 = 0.25
  // lib@2.0: 0.5 + 8/1 * 0.25 = 2.5; other: 0.25 + 8/2 * 0.25 = 1.25; lib@1.0 stays 0
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].label, "lib@2.0");
  EXPECT_EQ(out[0].score, 2.5);
  EXPECT_EQ(out[0].base_score, 0.125);
  EXPECT_TRUE(out[0].version_transferred);
  EXPECT_EQ(out[0].recency, 0u);
  EXPECT_EQ(out[1].label, "other");
  EXPECT_EQ(out[1].score, 1.25);
  EXPECT_EQ(out[2].label, "lib@1.0");
  EXPECT_EQ(out[2].score, 0.0);
  EXPECT_EQ(out[2].transferred_to, "lib@2.0");
  EXPECT_FALSE(out[2].in_cache);
}

TEST(Adjust, MeanUsesTopScores) {
  std::vector<AdjustedLabel> w{row("a", 0.1), row("b", 0.9), row("c", 0.5)};
  EXPECT_DOUBLE_EQ(mean_top_scores(w, 2), 0.7);
  EXPECT_DOUBLE_EQ(mean_top_scores(w, 10), 0.5);
}

TEST(Adjust, Unadjusted) {
  auto out = unadjusted({{"a", 0.3}, {"b", 0.2}}, cache_of({"b"}));
  EXPECT_FALSE(out[0].in_cache);
  EXPECT_TRUE(out[1].in_cache);
  EXPECT_EQ(out[1].score, 0.2);
}
