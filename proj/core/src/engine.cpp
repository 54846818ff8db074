#include "vulnlib/engine.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vulnlib/baselines.hpp"
#include "vulnlib/error.hpp"

namespace vulnlib {

using nlohmann::json;

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

std::filesystem::path with_suffix(const std::filesystem::path& p, const char* suffix) {
  return std::filesystem::path(p.string() + suffix);
}

}  // namespace

double relevance_probability(double r) {
  if (r >= 0.0) return 1.0 / (1.0 + std::exp(-r));
  double e = std::exp(r);
  return e / (1.0 + e);
}

ModelFiles ModelFiles::for_model(const std::filesystem::path& model) {
  return {model, with_suffix(model, ".docvocab"), with_suffix(model, ".labelvocab"),
          with_suffix(model, ".enhance.json"), with_suffix(model, ".meta.json")};
}

Engine Engine::fit(const Dataset& train, const std::map<LabelId, Label>& universe,
                   const EngineConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw Error(ErrorKind::kValidation, "training set is empty");
  Engine e;
  e.cfg_ = cfg;
  e.enhancer_ = Enhancer::fit(train, universe, cfg.enhance, cfg.use_enhancement);

  std::vector<std::string> doc_texts;
  doc_texts.reserve(train.size());
  for (const auto& r : train.reports) doc_texts.push_back(e.enhancer_.enhanced_text(r));
  e.doc_vocab_ = Vocabulary::fit(doc_texts, cfg.doc_ngram_max, cfg.min_df);

  std::map<LabelId, Label> full = universe;
  for (const auto& r : train.reports)
    for (const auto& l : r.labels)
      if (!full.count(l)) full.emplace(l, make_label(l));
  std::vector<std::string> label_texts;
  for (auto& [id, label] : full) {
    label.feature_text = e.enhancer_.label_text(label);
    label_texts.push_back(label.feature_text);
  }
  e.label_vocab_ = Vocabulary::fit(label_texts, cfg.label_ngram_max, 1);

  // Training label set: labels observed in the training reports.
  for (const auto& r : train.reports) e.train_labels_.insert(r.labels.begin(), r.labels.end());
  std::vector<LabelId> train_ids(e.train_labels_.begin(), e.train_labels_.end());
  std::map<LabelId, std::uint32_t> train_index;
  for (std::uint32_t j = 0; j < train_ids.size(); ++j) train_index[train_ids[j]] = j;

  std::vector<SparseVector> docs;
  docs.reserve(train.size());
  for (const auto& t : doc_texts) docs.push_back(tfidf_transform(t, e.doc_vocab_, true));
  std::vector<SparseVector> label_vecs;
  label_vecs.reserve(train_ids.size());
  for (const auto& id : train_ids)
    label_vecs.push_back(tfidf_transform(full.at(id).feature_text, e.label_vocab_, true));

  // Shared term space for choosing hard negatives.
  std::vector<std::string> match_label_texts;
  for (const auto& id : train_ids)
    match_label_texts.push_back(matching_text(full.at(id).feature_text, cfg.enhance));
  std::vector<std::string> match_corpus = doc_texts;
  match_corpus.insert(match_corpus.end(), match_label_texts.begin(), match_label_texts.end());
  Vocabulary match_vocab = Vocabulary::fit(match_corpus, 1, 1);
  std::vector<SparseVector> doc_match, label_match;
  for (const auto& t : doc_texts) doc_match.push_back(tfidf_transform(t, match_vocab, false));
  for (const auto& t : match_label_texts) label_match.push_back(tfidf_transform(t, match_vocab, false));

  std::vector<std::vector<std::uint32_t>> positives(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    for (const auto& l : train.reports[i].labels) positives[i].push_back(train_index.at(l));

  if (!train_ids.empty()) {
    auto pairs = build_training_pairs(positives, doc_match, label_match, cfg.learner, cfg.seed);
    e.n_pairs_ = pairs.size();
    if (!pairs.empty()) {
      e.W_ = vulnlib::train(pairs, docs, label_vecs, cfg.learner);
    }
  }
  if (e.W_.rows() == 0)
    e.W_ = WeightMatrix(e.doc_vocab_.size() + 1, e.label_vocab_.size() + 1);
  e.set_universe(full);
  return e;
}

void Engine::set_universe(const std::map<LabelId, Label>& universe) {
  universe_ = universe;
  labels_.clear();
  label_index_.clear();
  labels_.reserve(universe_.size());
  for (auto& [id, label] : universe_) {
    label.feature_text = enhancer_.label_text(label);
    label_index_[id] = labels_.size();
    labels_.push_back({id, tfidf_transform(label.feature_text, label_vocab_, true)});
  }
  store_ = VersionStore::build(universe_);
}

std::string Engine::enhanced_text(const VulnerabilityReport& report) const {
  return enhancer_.enhanced_text(report);
}

SparseVector Engine::featurize(const VulnerabilityReport& report) const {
  return tfidf_transform(enhancer_.enhanced_text(report), doc_vocab_, true);
}

std::vector<ScoredLabel> Engine::rank(const VulnerabilityReport& report, std::size_t k) const {
  return predict_topk(featurize(report), labels_, W_, k);
}

std::vector<AdjustedLabel> Engine::predict(const VulnerabilityReport& report,
                                           const LruCache& cache, std::size_t k,
                                           bool use_adjustment) const {
  if (labels_.empty()) throw Error(ErrorKind::kValidation, "empty label universe");
  auto scores = score_all(featurize(report), labels_, W_);
  for (auto& s : scores) s = relevance_probability(s);
  if (!use_adjustment) return unadjusted(top_k_from_scores(scores, labels_, k), cache);
  std::size_t window = std::max(cfg_.adjustment.i, k);
  auto top = top_k_from_scores(scores, labels_, window);
  auto lookup = [&](const LabelId& id) -> std::optional<double> {
    auto it = label_index_.find(id);
    if (it == label_index_.end()) return std::nullopt;
    return scores[it->second];
  };
  auto adjusted = adjust(top, store_, cache, cfg_.adjustment, lookup);
  if (adjusted.size() > k) adjusted.resize(k);
  return adjusted;
}

void Engine::save(const std::filesystem::path& model_path) const {
  ModelFiles files = ModelFiles::for_model(model_path);
  if (model_path.has_parent_path()) std::filesystem::create_directories(model_path.parent_path());
  ModelHeader header{cfg_.learner.K, cfg_.learner.lambda, cfg_.seed, doc_vocab_.checksum(),
                     label_vocab_.checksum()};
  write_file(files.model, serialize_model(W_, header));
  write_file(files.doc_vocab, doc_vocab_.serialize());
  write_file(files.label_vocab, label_vocab_.serialize());
  write_file(files.enhancer, enhancer_.to_json());
  json meta;
  meta["format"] = "vulnlib-model-meta";
  meta["version"] = 1;
  meta["seed"] = cfg_.seed;
  meta["config"] = cfg_.to_text();
  meta["training_pairs"] = n_pairs_;
  meta["training_labels"] = train_labels_;
  std::vector<LabelId> ids;
  for (const auto& [id, _] : universe_) ids.push_back(id);
  meta["universe"] = ids;
  write_file(files.meta, meta.dump(1) + "\n");
}

Engine Engine::load(const std::filesystem::path& model_path,
                    const std::optional<std::map<LabelId, Label>>& universe) {
  ModelFiles files = ModelFiles::for_model(model_path);
  Engine e;
  json meta = json::parse(read_file(files.meta), nullptr, false);
  if (meta.is_discarded() || meta.value("format", "") != "vulnlib-model-meta")
    throw Error(ErrorKind::kParse, files.meta.string() + ": not a model metadata file");
  e.cfg_ = EngineConfig::parse(meta.at("config").get<std::string>(), files.meta.string());
  e.n_pairs_ = meta.value("training_pairs", std::size_t{0});
  e.train_labels_ = meta.at("training_labels").get<std::set<LabelId>>();
  e.enhancer_ = Enhancer::from_json(read_file(files.enhancer));
  e.doc_vocab_ = Vocabulary::deserialize(read_file(files.doc_vocab));
  e.label_vocab_ = Vocabulary::deserialize(read_file(files.label_vocab));
  ModelHeader header;
  e.W_ = deserialize_model(read_file(files.model), header);
  if (header.doc_vocab_checksum != e.doc_vocab_.checksum() ||
      header.label_vocab_checksum != e.label_vocab_.checksum()) {
    throw Error(ErrorKind::kModelMismatch,
                model_path.string() + ": vocabulary checksum does not match the model header");
  }
  if (e.W_.rows() != e.doc_vocab_.size() + 1 || e.W_.cols() != e.label_vocab_.size() + 1)
    throw Error(ErrorKind::kModelMismatch, model_path.string() + ": dimensions do not match vocabularies");
  if (universe) {
    e.set_universe(*universe);
  } else {
    std::map<LabelId, Label> stored;
    for (const auto& id : meta.at("universe").get<std::vector<LabelId>>()) stored.emplace(id, make_label(id));
    e.set_universe(stored);
  }
  return e;
}

}  // namespace vulnlib
