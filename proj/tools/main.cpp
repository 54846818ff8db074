// vulnlib command-line front end.
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vulnlib/baselines.hpp"
#include "vulnlib/config.hpp"
#include "vulnlib/corpus.hpp"
#include "vulnlib/engine.hpp"
#include "vulnlib/error.hpp"
#include "vulnlib/evaluation.hpp"
#include "vulnlib/service.hpp"
#include "vulnlib/synthetic.hpp"

namespace fs = std::filesystem;
using namespace vulnlib;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kUsage = 2, kIo = 3, kConfig = 4, kData = 5, kMismatch = 6 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kIo;
    case ErrorKind::kConfig: return kConfig;
    case ErrorKind::kParse:
    case ErrorKind::kValidation: return kData;
    case ErrorKind::kModelMismatch: return kMismatch;
    default: return kOther;
  }
}

struct Common {
  std::string dataset;
  std::string labels;
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  bool no_enhance = false;
  bool no_adjust = false;
  bool by_year = false;
  bool unlabeled = false;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// defaults < config file < flags
EngineConfig resolve_config(const Common& c) {
  EngineConfig cfg = c.config.empty() ? EngineConfig{} : EngineConfig::load(c.config);
  for (const auto& kv : c.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kConfig, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.k) cfg.k = *c.k;
  if (c.no_enhance) cfg.use_enhancement = false;
  if (c.no_adjust) cfg.use_adjustment = false;
  if (c.by_year) cfg.split_mode = SplitMode::kYears;
  cfg.validate();
  return cfg;
}

Dataset load(const Common& c, LoadMode mode) {
  std::optional<fs::path> labels;
  if (!c.labels.empty()) labels = c.labels;
  return load_dataset(c.dataset, c.unlabeled ? LoadMode::kUnlabeled : mode, labels);
}

void add_dataset(CLI::App* cmd, Common& c, bool required = true) {
  auto* opt = cmd->add_option("--dataset", c.dataset, "JSON-Lines report file")->check(CLI::ExistingFile);
  if (required) opt->required();
  cmd->add_option("--labels", c.labels, "Label universe file, one id per line")->check(CLI::ExistingFile);
}

void add_config(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override a config key (key=value), repeatable");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--k", c.k, "Number of predicted labels")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-enhance", c.no_enhance, "Disable data enhancement");
  cmd->add_flag("--no-adjust", c.no_adjust, "Disable the time-aware adjustment");
  cmd->add_flag("--by-year", c.by_year, "Split on year boundaries instead of the 3:1:2 ratio");
}

TriageServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vulnlib: predict affected libraries for vulnerability reports"};
  app.require_subcommand(1);
  Common c;
  std::string out, out_dir, model, metrics_out, table_out, predictions_out, cache_path, session_path,
      history, kind = "exact", host = "127.0.0.1";
  int port = 8080;
  bool feedback = false, json = false, no_prewarm = false;
  std::size_t n_reports = 300, repeats = 3;
  std::uint64_t synth_seed = 7;
  std::vector<double> fractions{0.25, 0.5, 0.75, 1.0};

  auto* synth = app.add_subcommand("synth", "Write the seeded synthetic corpus");
  synth->add_option("--out", out, "Output JSON-Lines file")->required();
  synth->add_option("--n", n_reports, "Number of reports")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Generator seed");

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and write it in canonical form");
  add_dataset(ingest, c);
  ingest->add_flag("--unlabeled", c.unlabeled, "Allow reports without labels");
  ingest->add_option("--out", out, "Canonical JSON-Lines output");
  ingest->add_option("--labels-out", out_dir, "Label universe output");

  auto* split = app.add_subcommand("split", "Chronological train/validation/test split");
  add_dataset(split, c);
  add_config(split, c);
  split->add_option("--out-dir", out_dir, "Directory for train/validation/test .jsonl");

  auto* census = app.add_subcommand("census", "Seen/unseen label statistics");
  add_dataset(census, c);
  add_config(census, c);
  census->add_flag("--json", json, "Print JSON instead of a table");

  auto* enhance = app.add_subcommand("enhance", "Write enhanced report texts");
  add_dataset(enhance, c);
  add_config(enhance, c);
  enhance->add_option("--out", out, "Output JSON-Lines of {id, text}")->required();

  auto* train = app.add_subcommand("train", "Fit a model on the training split");
  add_dataset(train, c);
  add_config(train, c);
  train->add_option("--model-out", model, "Model file (sidecars are written next to it)")->required();

  auto* predict = app.add_subcommand("predict", "Rank labels for every report of a dataset");
  add_dataset(predict, c);
  add_config(predict, c);
  predict->add_flag("--unlabeled", c.unlabeled, "Allow reports without labels");
  predict->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--cache", cache_path, "Cache snapshot (JSON) to start from")->check(CLI::ExistingFile);
  predict->add_flag("--feedback", feedback, "Insert each report's labels into the cache after predicting");
  predict->add_option("--out", out, "Predictions JSON-Lines (stdout when omitted)");

  auto* evaluate = app.add_subcommand("evaluate", "Chronological streaming evaluation");
  add_dataset(evaluate, c);
  add_config(evaluate, c);
  evaluate->add_option("--model", model, "Evaluate a saved model instead of training")->check(CLI::ExistingFile);
  evaluate->add_flag("--no-prewarm", no_prewarm, "Start the test stream with an empty cache");
  evaluate->add_option("--metrics-out", metrics_out, "Metrics JSON");
  evaluate->add_option("--table-out", table_out, "Metrics table");
  evaluate->add_option("--predictions-out", predictions_out, "Predictions JSON-Lines");

  auto* baseline = app.add_subcommand("baseline", "Evaluate a baseline: exact, cpe or ir");
  add_dataset(baseline, c);
  add_config(baseline, c);
  baseline->add_option("--kind", kind, "exact | cpe | ir")->check(CLI::IsMember({"exact", "cpe", "ir"}));
  baseline->add_option("--metrics-out", metrics_out, "Metrics JSON");

  auto* timing = app.add_subcommand("timing", "Training and inference time against data size");
  add_dataset(timing, c);
  add_config(timing, c);
  timing->add_option("--fractions", fractions, "Dataset fractions")->delimiter(',');
  timing->add_option("--repeats", repeats, "Repeats per fraction")->check(CLI::PositiveNumber);
  timing->add_option("--out", out, "CSV output (stdout when omitted)");

  auto* serve = app.add_subcommand("serve", "Serve the triage session over HTTP on loopback");
  add_dataset(serve, c);
  add_config(serve, c);
  serve->add_flag("--unlabeled", c.unlabeled, "Allow reports without labels");
  serve->add_option("--model", model, "Model file")->required()->check(CLI::ExistingFile);
  serve->add_option("--history", history, "Earlier labeled reports used to pre-warm the cache")
      ->check(CLI::ExistingFile);
  serve->add_option("--session", session_path, "Session file; resumed when it exists");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) {
      SyntheticOptions opts;
      opts.n_reports = n_reports;
      opts.seed = synth_seed;
      Dataset d = generate_synthetic(opts);
      write_dataset(d, out);
      std::printf("wrote %zu reports, %zu labels to %s\n", d.size(), d.labels.size(), out.c_str());
    } else if (*ingest) {
      Dataset d = load(c, LoadMode::kLabeled);
      std::printf("reports: %zu\nlabels: %zu\n", d.size(), d.labels.size());
      if (!d.empty())
        std::printf("published: %s .. %s\n", d.reports.front().published.to_string().c_str(),
                    d.reports.back().published.to_string().c_str());
      if (!out.empty()) write_dataset(d, out);
      if (!out_dir.empty()) write_label_universe(d, out_dir);
    } else if (*split) {
      EngineConfig cfg = resolve_config(c);
      ChronoSplit s = split_dataset(load(c, LoadMode::kLabeled), cfg);
      std::printf("train: %zu\nvalidation: %zu\ntest: %zu\n", s.train.size(), s.validation.size(),
                  s.test.size());
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_dataset(s.train, fs::path(out_dir) / "train.jsonl");
        write_dataset(s.validation, fs::path(out_dir) / "validation.jsonl");
        write_dataset(s.test, fs::path(out_dir) / "test.jsonl");
      }
    } else if (*census) {
      EngineConfig cfg = resolve_config(c);
      ChronoSplit s = split_dataset(load(c, LoadMode::kLabeled), cfg);
      CensusReport r = unseen_census(s, c.by_year ? CensusGranularity::kPerYear : CensusGranularity::kPerSplit);
      std::fputs((json ? r.to_json() : r.to_table()).c_str(), stdout);
    } else if (*enhance) {
      EngineConfig cfg = resolve_config(c);
      Dataset d = load(c, LoadMode::kLabeled);
      ChronoSplit s = split_dataset(d, cfg);
      Enhancer e = Enhancer::fit(s.train, d.labels, cfg.enhance, cfg.use_enhancement);
      std::string text;
      for (const auto& r : d.reports) {
        nlohmann::ordered_json j;
        j["id"] = r.id;
        j["text"] = e.enhanced_text(r);
        text += j.dump() + "\n";
      }
      write_text(out, text);
    } else if (*train) {
      EngineConfig cfg = resolve_config(c);
      Dataset d = load(c, LoadMode::kLabeled);
      ChronoSplit s = split_dataset(d, cfg);
      Engine engine = Engine::fit(s.train, d.labels, cfg);
      engine.save(model);
      std::printf("trained on %zu reports, %zu pairs, nnz(W) = %zu, seed = %llu\nmodel: %s\n",
                  s.train.size(), engine.training_pairs(), engine.weights().nnz(),
                  static_cast<unsigned long long>(cfg.seed), model.c_str());
    } else if (*predict) {
      Dataset d = load(c, LoadMode::kLabeled);
      Engine engine = Engine::load(model);
      EngineConfig cfg = engine.config();
      if (c.k) cfg.k = *c.k;
      if (c.no_adjust) cfg.use_adjustment = false;
      auto universe = engine.universe();
      std::size_t before = universe.size();
      for (const auto& [id, l] : d.labels) universe.emplace(id, l);
      if (universe.size() != before) engine.set_universe(universe);
      LruCache cache = cache_path.empty() ? LruCache(cfg.cache_size) : LruCache::from_json(read_text(cache_path));
      std::vector<ReportPrediction> preds;
      for (const auto& r : d.reports) {
        preds.push_back({r.id, engine.predict(r, cache, cfg.k, cfg.use_adjustment)});
        if (feedback) insert_ground_truth(cache, r.labels);
      }
      std::string text = predictions_to_jsonl(preds);
      if (out.empty()) std::fputs(text.c_str(), stdout);
      else write_text(out, text);
    } else if (*evaluate) {
      EngineConfig cfg = resolve_config(c);
      if (no_prewarm) cfg.prewarm_cache = false;
      Dataset d = load(c, LoadMode::kLabeled);
      ChronoSplit s = split_dataset(d, cfg);
      ExperimentResult res;
      if (!model.empty()) {
        Engine engine = Engine::load(model, d.labels);
        res = evaluate_split(engine, s, cfg);
      } else {
        res = evaluate_split(Engine::fit(s.train, d.labels, cfg), s, cfg);
      }
      std::string title = std::string("vulnlib") + (cfg.use_enhancement ? "" : " w/o enhancement") +
                          (cfg.use_adjustment ? "" : " w/o adjustment");
      std::fputs(res.stream.metrics.to_table(title).c_str(), stdout);
      if (!metrics_out.empty()) write_text(metrics_out, res.stream.metrics.to_json());
      if (!table_out.empty()) write_text(table_out, res.stream.metrics.to_table(title));
      if (!predictions_out.empty()) write_text(predictions_out, predictions_to_jsonl(res.stream.predictions));
    } else if (*baseline) {
      EngineConfig cfg = resolve_config(c);
      Dataset d = load(c, LoadMode::kLabeled);
      BaselineKind bk = parse_baseline_kind(kind);
      BaselineResult res = evaluate_baseline(bk, split_dataset(d, cfg), d.labels, cfg);
      std::fputs(res.metrics.to_table("baseline " + to_string(bk)).c_str(), stdout);
      if (!metrics_out.empty()) write_text(metrics_out, res.metrics.to_json());
    } else if (*timing) {
      EngineConfig cfg = resolve_config(c);
      TimingProfile p = timing_profile(load(c, LoadMode::kLabeled), cfg, fractions, repeats);
      if (out.empty()) std::fputs(p.to_csv().c_str(), stdout);
      else write_text(out, p.to_csv());
    } else if (*serve) {
      Dataset queue = load(c, LoadMode::kLabeled);
      Engine engine = Engine::load(model);
      if (c.k) engine.mutable_config().k = *c.k;
      if (c.no_adjust) engine.mutable_config().use_adjustment = false;
      auto universe = engine.universe();
      for (const auto& [id, l] : queue.labels) universe.emplace(id, l);
      engine.set_universe(universe);
      LruCache cache(engine.config().cache_size);
      if (!history.empty()) {
        Dataset h = load_dataset(history, LoadMode::kLabeled);
        cache = prewarmed_cache({&h}, engine.config().cache_size);
      }
      std::optional<fs::path> session_file;
      if (!session_path.empty()) session_file = session_path;
      std::unique_ptr<TriageSession> session;
      if (session_file && fs::exists(*session_file)) {
        session = TriageSession::restore(std::move(engine), std::move(queue), read_text(*session_file),
                                         session_file);
      } else {
        session = std::make_unique<TriageSession>(std::move(engine), std::move(queue), cache, session_file);
      }
      TriageServer server(*session);
      int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::printf("serving on http://%s:%d\n", host.c_str(), bound);
      std::fflush(stdout);
      server.run();
      g_server = nullptr;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
  return kOk;
}
