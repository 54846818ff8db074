#include "vulnlib/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vulnlib/baselines.hpp"
#include "vulnlib/error.hpp"
#include "vulnlib/log.hpp"

namespace vulnlib {

using nlohmann::ordered_json;

LruCache prewarmed_cache(const std::vector<const Dataset*>& history, std::size_t capacity) {
  LruCache cache(capacity);
  for (const Dataset* d : history)
    for (const auto& r : d->reports) insert_ground_truth(cache, r.labels);
  return cache;
}

StreamResult evaluate_stream(const Engine& engine, const Dataset& test, LruCache& cache,
                             bool use_adjustment, std::size_t keep) {
  StreamResult out;
  std::vector<PerReportMetrics> per_report;
  std::size_t window = std::max(keep, kMaxK);
  for (const auto& report : test.reports) {
    auto ranked = engine.predict(report, cache, window, use_adjustment);
    if (report.labels.empty()) {
      log::warn("report " + report.id + " has no ground truth; excluded from metrics");
      ++out.excluded;
    } else {
      std::vector<LabelId> ids;
      for (const auto& a : ranked) ids.push_back(a.label);
      if (auto m = evaluate_ranking(ids, report.labels)) per_report.push_back(*m);
      insert_ground_truth(cache, report.labels);
    }
    if (ranked.size() > keep) ranked.resize(keep);
    out.predictions.push_back({report.id, std::move(ranked)});
  }
  if (!per_report.empty()) out.metrics = aggregate(per_report);
  return out;
}

ChronoSplit split_dataset(const Dataset& dataset, const EngineConfig& cfg) {
  return cfg.split_mode == SplitMode::kRatio ? chronological_split(dataset, cfg.split_ratio)
                                             : chronological_split(dataset, cfg.split_years);
}

ExperimentResult evaluate_split(const Engine& engine, const ChronoSplit& split,
                                const EngineConfig& cfg) {
  ExperimentResult res;
  res.n_train = split.train.size();
  res.n_validation = split.validation.size();
  res.n_test = split.test.size();
  LruCache cache = cfg.prewarm_cache ? prewarmed_cache({&split.train, &split.validation}, cfg.cache_size)
                                     : LruCache(cfg.cache_size);
  res.stream = evaluate_stream(engine, split.test, cache, cfg.use_adjustment, cfg.k);
  return res;
}

ExperimentResult run_experiment(const Dataset& dataset, const EngineConfig& cfg) {
  ChronoSplit split = split_dataset(dataset, cfg);
  Engine engine = Engine::fit(split.train, dataset.labels, cfg);
  return evaluate_split(engine, split, cfg);
}

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "exact") return BaselineKind::kExactMatch;
  if (name == "cpe") return BaselineKind::kCpe;
  if (name == "ir") return BaselineKind::kIr;
  throw Error(ErrorKind::kConfig, "unknown baseline '" + std::string(name) + "' (exact, cpe, ir)");
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kExactMatch: return "exact";
    case BaselineKind::kCpe: return "cpe";
    case BaselineKind::kIr: return "ir";
  }
  return "?";
}

BaselineResult evaluate_baseline(BaselineKind kind, const ChronoSplit& split,
                                 const std::map<LabelId, Label>& universe,
                                 const EngineConfig& cfg) {
  if (universe.empty()) throw Error(ErrorKind::kValidation, "empty label universe");
  BaselineResult out;
  std::optional<Enhancer> enhancer;
  std::optional<IrBaseline> ir;
  if (kind != BaselineKind::kCpe) {
    if (split.train.empty()) throw Error(ErrorKind::kValidation, "training split is empty");
    enhancer = Enhancer::fit(split.train, universe, cfg.enhance, true);
  }
  if (kind == BaselineKind::kIr) {
    std::vector<std::string> docs;
    for (const auto& r : split.train.reports) docs.push_back(enhancer->enhanced_text(r));
    std::vector<std::pair<LabelId, std::string>> labels;
    for (const auto& [id, label] : universe)
      labels.emplace_back(id, matching_text(enhancer->label_text(label), cfg.enhance));
    ir.emplace(docs, std::move(labels), cfg.ir_ngram_max);
  }

  std::vector<PerReportMetrics> per_report;
  for (const auto& report : split.test.reports) {
    std::vector<LabelId> ranked;
    switch (kind) {
      case BaselineKind::kExactMatch:
        ranked = baseline_exact_match(enhancer->raw_text(report, cfg.exact_match_uses_references),
                                      universe, kMaxK);
        break;
      case BaselineKind::kCpe:
        ranked = baseline_cpe(report, kMaxK);
        break;
      case BaselineKind::kIr:
        for (auto& [id, _] : ir->rank(enhancer->enhanced_text(report), kMaxK)) ranked.push_back(id);
        break;
    }
    if (report.labels.empty()) {
      log::warn("report " + report.id + " has no ground truth; excluded from metrics");
    } else if (auto m = evaluate_ranking(ranked, report.labels)) {
      per_report.push_back(*m);
    }
    out.predictions.emplace_back(report.id, std::move(ranked));
  }
  if (!per_report.empty()) out.metrics = aggregate(per_report);
  return out;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return 0.0;
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

std::string TimingProfile::to_csv() const {
  std::ostringstream out;
  out << "fraction,n_train,n_infer,train_ms,infer_ms,train_ms_per_report,infer_ms_per_report\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.4f,%zu,%zu,%.3f,%.3f,%.5f,%.5f\n", r.fraction, r.n_train,
                  r.n_infer, r.train_ms, r.infer_ms, r.train_ms_per_report(), r.infer_ms_per_report());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# r2_train=%.4f r2_infer=%.4f\n", train_r2, infer_r2);
  out << buf;
  return out.str();
}

TimingProfile timing_profile(const Dataset& dataset, const EngineConfig& cfg,
                             const std::vector<double>& fractions, std::size_t repeats) {
  if (fractions.empty()) throw Error(ErrorKind::kValidation, "no fractions given");
  if (repeats == 0) throw Error(ErrorKind::kValidation, "repeats must be positive");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw Error(ErrorKind::kValidation, "fraction must be in (0, 1], got " + std::to_string(f));
  ChronoSplit split = split_dataset(dataset, cfg);
  if (split.train.empty()) throw Error(ErrorKind::kValidation, "training split is empty");
  using clock = std::chrono::steady_clock;
  auto take = [](const Dataset& d, double f) {
    Dataset out;
    out.labels = d.labels;
    std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(f * d.size())));
    n = std::min(n, d.size());
    out.reports.assign(d.reports.begin(), d.reports.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  };
  TimingProfile prof;
  std::vector<double> xs, ts, is;
  for (double f : fractions) {
    TimingRow row;
    row.fraction = f;
    Dataset train = take(split.train, f);
    Dataset test = split.test.empty() ? Dataset{} : take(split.test, f);
    row.n_train = train.size();
    row.n_infer = test.size();
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      auto t0 = clock::now();
      Engine engine = Engine::fit(train, dataset.labels, cfg);
      auto t1 = clock::now();
      LruCache cache(cfg.cache_size);
      for (const auto& r : test.reports) {
        engine.predict(r, cache, cfg.k, cfg.use_adjustment);
        insert_ground_truth(cache, r.labels);
      }
      auto t2 = clock::now();
      row.train_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
      row.infer_ms += std::chrono::duration<double, std::milli>(t2 - t1).count();
    }
    row.train_ms /= static_cast<double>(repeats);
    row.infer_ms /= static_cast<double>(repeats);
    xs.push_back(f);
    ts.push_back(row.train_ms);
    is.push_back(row.infer_ms);
    prof.rows.push_back(row);
  }
  prof.train_r2 = r_squared(xs, ts);
  prof.infer_r2 = r_squared(xs, is);
  return prof;
}

namespace {

ordered_json adjusted_to_json(const AdjustedLabel& a) {
  ordered_json j;
  j["label"] = a.label;
  j["score"] = a.score;
  j["base_score"] = a.base_score;
  j["in_cache"] = a.in_cache;
  j["recency_index"] = a.recency ? ordered_json(*a.recency) : ordered_json(nullptr);
  j["version_transferred"] = a.version_transferred;
  j["transferred_to"] = a.transferred_to ? ordered_json(*a.transferred_to) : ordered_json(nullptr);
  return j;
}

}  // namespace

std::string adjusted_label_json(const AdjustedLabel& label) { return adjusted_to_json(label).dump(); }

std::string predictions_to_jsonl(const std::vector<ReportPrediction>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    ordered_json j;
    j["id"] = p.report_id;
    j["labels"] = ordered_json::array();
    for (const auto& a : p.labels) j["labels"].push_back(adjusted_to_json(a));
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace vulnlib
