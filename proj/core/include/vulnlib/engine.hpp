#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "vulnlib/config.hpp"
#include "vulnlib/corpus.hpp"
#include "vulnlib/enhance.hpp"
#include "vulnlib/features.hpp"
#include "vulnlib/learner.hpp"
#include "vulnlib/temporal.hpp"

namespace vulnlib {

/// sigma(R): the logistic reading of a relevance score under the training
/// loss. Monotone, so rankings are unchanged.
double relevance_probability(double relevance);

/// Sidecar paths written next to a model file.
struct ModelFiles {
  std::filesystem::path model;
  std::filesystem::path doc_vocab;
  std::filesystem::path label_vocab;
  std::filesystem::path enhancer;
  std::filesystem::path meta;

  static ModelFiles for_model(const std::filesystem::path& model);
};

/// The trained pipeline: enhancement state, both vocabularies, W, and the
/// featurized label universe (seen and unseen labels alike).
class Engine {
 public:
  /// Enhance -> featurize -> sample pairs -> train. `universe` may contain
  /// labels that never occur in `train`.
  static Engine fit(const Dataset& train, const std::map<LabelId, Label>& universe,
                    const EngineConfig& cfg);

  void save(const std::filesystem::path& model_path) const;
  /// Loads a model and its sidecars. When `universe` is given, labels are
  /// re-featurized against the stored label vocabulary; otherwise the stored
  /// universe is used. Throws Error(kModelMismatch) on checksum mismatch.
  static Engine load(const std::filesystem::path& model_path,
                     const std::optional<std::map<LabelId, Label>>& universe = std::nullopt);

  /// Replaces the prediction universe (version store included).
  void set_universe(const std::map<LabelId, Label>& universe);

  SparseVector featurize(const VulnerabilityReport& report) const;
  std::string enhanced_text(const VulnerabilityReport& report) const;

  /// Raw model ranking (top-k by relevance).
  std::vector<ScoredLabel> rank(const VulnerabilityReport& report, std::size_t k) const;

  /// Top-k after the time-aware adjustment over the top-i window, or the raw
  /// top-k when `use_adjustment` is false. Scores are relevance_probability
  /// values, so the cache boost and the version transfer work on [0, 1].
  /// Flags reflect `cache`.
  std::vector<AdjustedLabel> predict(const VulnerabilityReport& report, const LruCache& cache,
                                     std::size_t k, bool use_adjustment) const;

  const EngineConfig& config() const { return cfg_; }
  EngineConfig& mutable_config() { return cfg_; }
  const Enhancer& enhancer() const { return enhancer_; }
  const Vocabulary& doc_vocab() const { return doc_vocab_; }
  const Vocabulary& label_vocab() const { return label_vocab_; }
  const WeightMatrix& weights() const { return W_; }
  const std::vector<FeaturizedLabel>& labels() const { return labels_; }
  const std::map<LabelId, Label>& universe() const { return universe_; }
  const VersionStore& versions() const { return store_; }
  /// Labels that occurred in the training reports.
  const std::set<LabelId>& training_labels() const { return train_labels_; }
  std::size_t training_pairs() const { return n_pairs_; }

 private:
  EngineConfig cfg_;
  Enhancer enhancer_;
  Vocabulary doc_vocab_;
  Vocabulary label_vocab_;
  WeightMatrix W_;
  std::map<LabelId, Label> universe_;
  std::vector<FeaturizedLabel> labels_;
  std::unordered_map<LabelId, std::size_t> label_index_;
  VersionStore store_;
  std::set<LabelId> train_labels_;
  std::size_t n_pairs_ = 0;
};

}  // namespace vulnlib
