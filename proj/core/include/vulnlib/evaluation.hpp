#pragma once

#include <map>
#include <string>
#include <vector>

#include "vulnlib/config.hpp"
#include "vulnlib/corpus.hpp"
#include "vulnlib/engine.hpp"
#include "vulnlib/metrics.hpp"
#include "vulnlib/temporal.hpp"

namespace vulnlib {

struct ReportPrediction {
  std::string report_id;
  std::vector<AdjustedLabel> labels;
};

struct StreamResult {
  MetricsReport metrics;
  std::vector<ReportPrediction> predictions;  // every streamed report, in order
  std::size_t excluded = 0;                   // reports without ground truth
};

/// Cache filled with the ground truth of the given datasets, in order.
LruCache prewarmed_cache(const std::vector<const Dataset*>& history, std::size_t capacity);

/// Streams `test` in order: predict, optionally adjust, score the top 3,
/// then push the report's ground truth into `cache`. `keep` bounds the
/// number of labels kept per stored prediction.
StreamResult evaluate_stream(const Engine& engine, const Dataset& test, LruCache& cache,
                             bool use_adjustment, std::size_t keep = kMaxK);

ChronoSplit split_dataset(const Dataset& dataset, const EngineConfig& cfg);

struct ExperimentResult {
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
  std::size_t n_test = 0;
  StreamResult stream;
};

/// Streams the test split through an already fitted engine, with the cache
/// pre-warmed from train + validation when the config says so.
ExperimentResult evaluate_split(const Engine& engine, const ChronoSplit& split,
                                const EngineConfig& cfg);

/// split -> fit on train -> evaluate_split. The universe is every label of
/// `dataset` (seen and unseen).
ExperimentResult run_experiment(const Dataset& dataset, const EngineConfig& cfg);

enum class BaselineKind { kExactMatch, kCpe, kIr };
BaselineKind parse_baseline_kind(std::string_view name);
std::string to_string(BaselineKind kind);

struct BaselineResult {
  MetricsReport metrics;
  std::vector<std::pair<std::string, std::vector<LabelId>>> predictions;
};

/// Scores a baseline on the test split of `split`. Text-based baselines use
/// state fitted on the training split only.
BaselineResult evaluate_baseline(BaselineKind kind, const ChronoSplit& split,
                                 const std::map<LabelId, Label>& universe,
                                 const EngineConfig& cfg);

struct TimingRow {
  double fraction = 0.0;
  std::size_t n_train = 0;
  std::size_t n_infer = 0;
  double train_ms = 0.0;  // total, averaged over repeats
  double infer_ms = 0.0;
  double train_ms_per_report() const { return n_train ? train_ms / n_train : 0.0; }
  double infer_ms_per_report() const { return n_infer ? infer_ms / n_infer : 0.0; }
};

struct TimingProfile {
  std::vector<TimingRow> rows;
  double train_r2 = 0.0;  // least-squares fit of total time against fraction
  double infer_r2 = 0.0;
  std::string to_csv() const;
};

/// Trains on the first fraction of the training split and predicts the
/// same fraction of the test split, `repeats` times per fraction. Throws
/// Error(kValidation) for fractions outside (0, 1].
TimingProfile timing_profile(const Dataset& dataset, const EngineConfig& cfg,
                             const std::vector<double>& fractions, std::size_t repeats = 3);

/// Coefficient of determination of the least-squares line through (x, y).
double r_squared(const std::vector<double>& x, const std::vector<double>& y);

/// One JSON object per line: {"id", "labels": [{label, score, ...}]}.
std::string predictions_to_jsonl(const std::vector<ReportPrediction>& predictions);
std::string adjusted_label_json(const AdjustedLabel& label);

}  // namespace vulnlib
