#include <gtest/gtest.h>

#include "vulnlib/error.hpp"
#include "vulnlib/evaluation.hpp"
#include "vulnlib/log.hpp"
#include "vulnlib/synthetic.hpp"

using namespace vulnlib;

namespace {

const Dataset& corpus() {
  static const Dataset d = [] {
    SyntheticOptions o;
    o.n_reports = 150;
    return generate_synthetic(o);
  }();
  return d;
}

}  // namespace

TEST(Synthetic, DeterministicAndChronological) {
  SyntheticOptions o;
  o.n_reports = 50;
  Dataset a = generate_synthetic(o), b = generate_synthetic(o);
  EXPECT_EQ(dataset_to_jsonl(a), dataset_to_jsonl(b));
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a.reports[i - 1].published, a.reports[i].published);
  EXPECT_NO_THROW(a.validate());
  o.seed = 8;
  EXPECT_NE(dataset_to_jsonl(generate_synthetic(o)), dataset_to_jsonl(a));
}

TEST(Synthetic, TestSplitHasUnseenLabels) {
  ChronoSplit s = chronological_split(corpus());
  CensusReport c = unseen_census(s, CensusGranularity::kPerSplit);
  EXPECT_GT(c.periods.back().unseen_labels, 0u);
}

TEST(Evaluation, Deterministic) {
  EngineConfig cfg;
  auto a = run_experiment(corpus(), cfg);
  auto b = run_experiment(corpus(), cfg);
  EXPECT_EQ(a.stream.metrics.to_json(), b.stream.metrics.to_json());
  EXPECT_EQ(predictions_to_jsonl(a.stream.predictions), predictions_to_jsonl(b.stream.predictions));
  EXPECT_EQ(a.n_train + a.n_validation + a.n_test, corpus().size());
}

TEST(Evaluation, StreamMatchesDirectPredict) {
  EngineConfig cfg;
  ChronoSplit split = split_dataset(corpus(), cfg);
  Engine engine = Engine::fit(split.train, corpus().labels, cfg);
  auto result = evaluate_split(engine, split, cfg);

  LruCache cache = prewarmed_cache({&split.train, &split.validation}, cfg.cache_size);
  ASSERT_EQ(result.stream.predictions.size(), split.test.size());
  for (std::size_t n = 0; n < split.test.size(); ++n) {
    const auto& r = split.test.reports[n];
    auto direct = engine.predict(r, cache, 3, true);
    const auto& streamed = result.stream.predictions[n].labels;
    ASSERT_EQ(streamed.size(), direct.size());
    for (std::size_t j = 0; j < direct.size(); ++j) {
      EXPECT_EQ(streamed[j].label, direct[j].label);
      EXPECT_EQ(streamed[j].score, direct[j].score);
    }
    insert_ground_truth(cache, r.labels);
  }
}

TEST(Evaluation, NoAdjustIgnoresCache) {
  EngineConfig cfg;
  ChronoSplit split = split_dataset(corpus(), cfg);
  Engine engine = Engine::fit(split.train, corpus().labels, cfg);
  LruCache empty(300);
  LruCache full = prewarmed_cache({&split.train, &split.validation}, 300);
  auto a = evaluate_stream(engine, split.test, empty, false);
  auto b = evaluate_stream(engine, split.test, full, false);
  EXPECT_EQ(a.metrics.to_json(), b.metrics.to_json());

  // and equals a batch evaluation of the raw ranking
  std::vector<PerReportMetrics> rows;
  for (const auto& r : split.test.reports) {
    std::vector<LabelId> ids;
    for (const auto& s : engine.rank(r, 3)) ids.push_back(s.label);
    rows.push_back(*evaluate_ranking(ids, r.labels));
  }
  EXPECT_EQ(aggregate(rows).to_json(), a.metrics.to_json());
}

TEST(Evaluation, AdjustmentHelpsOnClusteredVersions) {
  EngineConfig cfg;
  auto on = run_experiment(corpus(), cfg);
  cfg.use_adjustment = false;
  auto off = run_experiment(corpus(), cfg);
  EXPECT_GE(on.stream.metrics.avg_f1, off.stream.metrics.avg_f1);
}

TEST(Evaluation, UnlabeledReportsExcluded) {
  EngineConfig cfg;
  ChronoSplit split = split_dataset(corpus(), cfg);
  Engine engine = Engine::fit(split.train, corpus().labels, cfg);
  Dataset test = split.test;
  test.reports[0].labels.clear();
  LruCache cache(300);
  log::ScopedCapture capture;
  auto r = evaluate_stream(engine, test, cache, true);
  EXPECT_EQ(r.excluded, 1u);
  EXPECT_EQ(r.metrics.n, test.size() - 1);
  EXPECT_FALSE(capture.messages().empty());
}

TEST(Baselines, DeterministicAndBounded) {
  EngineConfig cfg;
  ChronoSplit split = split_dataset(corpus(), cfg);
  for (auto kind : {BaselineKind::kExactMatch, BaselineKind::kCpe, BaselineKind::kIr}) {
    auto a = evaluate_baseline(kind, split, corpus().labels, cfg);
    auto b = evaluate_baseline(kind, split, corpus().labels, cfg);
    EXPECT_EQ(a.metrics.to_json(), b.metrics.to_json()) << to_string(kind);
    EXPECT_GE(a.metrics.avg_f1, 0.0);
    EXPECT_LE(a.metrics.avg_f1, 1.0);
    EXPECT_EQ(parse_baseline_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_baseline_kind("zest"), Error);
}

TEST(Timing, RejectsZeroFraction) {
  EXPECT_THROW(timing_profile(corpus(), EngineConfig{}, {0.0}), Error);
  EXPECT_THROW(timing_profile(corpus(), EngineConfig{}, {1.5}), Error);
}

TEST(Timing, RowsAndCsv) {
  auto p = timing_profile(corpus(), EngineConfig{}, {0.5, 1.0}, 1);
  ASSERT_EQ(p.rows.size(), 2u);
  EXPECT_LT(p.rows[0].n_train, p.rows[1].n_train);
  EXPECT_GT(p.rows[1].train_ms, 0.0);
  EXPECT_NE(p.to_csv().find("fraction"), std::string::npos);
}

TEST(Timing, RSquared) {
  EXPECT_DOUBLE_EQ(r_squared({1, 2, 3}, {2, 4, 6}), 1.0);
  EXPECT_LT(r_squared({1, 2, 3, 4}, {1, 3, 1, 3}), 0.5);
}
