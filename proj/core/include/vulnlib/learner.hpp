#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vulnlib/corpus.hpp"
#include "vulnlib/features.hpp"

namespace vulnlib {

struct LearnerParams {
  std::size_t K = 64;            // non-zeros allowed per row of W
  double lambda = 1.0;           // weight of the logistic loss
  std::size_t negatives_per_doc = 20;
  std::size_t refine_passes = 3;
  std::size_t candidate_cap = 50000;

  void validate() const;
};

/// Row-sparse D' x L' parameter matrix of the bilinear relevance model.
class WeightMatrix {
 public:
  using Entry = std::pair<ColumnId, double>;

  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows) {}

  std::size_t rows() const { return data_.size(); }
  std::size_t cols() const { return cols_; }
  std::span<const Entry> row(std::size_t i) const { return data_[i]; }
  /// Entries must be sorted by column, unique and < cols().
  void set_row(std::size_t i, std::vector<Entry> entries);
  double get(std::size_t row, ColumnId col) const;
  /// Inserts, overwrites or (for 0.0) erases one entry.
  void set(std::size_t row, ColumnId col, double value);

  std::size_t nnz() const;
  std::size_t max_row_nnz() const;
  double squared_norm() const;

  /// Dense d^T W, length cols().
  std::vector<double> project(const SparseVector& d) const;

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<std::vector<Entry>> data_;
};

/// d^T W l. Throws Error(kValidation) when d.dim != rows or l.dim != cols.
double relevance(const SparseVector& d, const SparseVector& l, const WeightMatrix& W);

struct TrainingPair {
  std::uint32_t doc = 0;
  std::uint32_t label = 0;
  int y = 1;  // +1 or -1

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

/// Positives for each document plus `negatives_per_doc` negatives: the most
/// cosine-similar non-positive labels (similarity > 0, measured between
/// `doc_match` and `label_match`, which share a feature space), padded with
/// seeded uniform draws from the remaining non-positives. Documents without
/// positives are skipped with a warning.
std::vector<TrainingPair> build_training_pairs(
    const std::vector<std::vector<std::uint32_t>>& positives,
    const std::vector<SparseVector>& doc_match, const std::vector<SparseVector>& label_match,
    const LearnerParams& params, std::uint64_t seed);

/// 1/2 ||W||^2 + lambda * sum over pairs of log(1 + exp(-y d^T W l)).
double objective(const WeightMatrix& W, std::span<const TrainingPair> pairs,
                 std::span<const SparseVector> docs, std::span<const SparseVector> labels,
                 double lambda);

/// Exact partial derivative of objective() with respect to W(row, col).
double coordinate_gradient(const WeightMatrix& W, std::span<const TrainingPair> pairs,
                           std::span<const SparseVector> docs,
                           std::span<const SparseVector> labels, double lambda,
                           std::size_t row, ColumnId col);

/// First solver phase: quadratic model of the objective around W = 0,
/// per-row top-K support by predicted decrease g^2/(2h), entries -g/h.
WeightMatrix approximate_phase(std::span<const TrainingPair> pairs,
                               std::span<const SparseVector> docs,
                               std::span<const SparseVector> labels, const LearnerParams& params);

/// Second solver phase: coordinate Newton passes over the fixed support with
/// steps clipped to |delta| <= 1 and halved until the objective decreases.
/// Returns the objective after each pass (first element: before pass 1).
std::vector<double> refine_phase(WeightMatrix& W, std::span<const TrainingPair> pairs,
                                 std::span<const SparseVector> docs,
                                 std::span<const SparseVector> labels,
                                 const LearnerParams& params);

/// approximate_phase followed by refine_phase. Throws Error(kValidation) on
/// an empty pair list and Error(kNumeric) on a non-finite entry.
WeightMatrix train(std::span<const TrainingPair> pairs, std::span<const SparseVector> docs,
                   std::span<const SparseVector> labels, const LearnerParams& params);

struct FeaturizedLabel {
  LabelId id;
  SparseVector features;
};

struct ScoredLabel {
  LabelId label;
  double score = 0.0;

  friend bool operator==(const ScoredLabel&, const ScoredLabel&) = default;
};

/// Descending score, ascending id on ties.
bool ranks_before(const ScoredLabel& a, const ScoredLabel& b);

/// Relevance of every label, in universe order.
std::vector<double> score_all(const SparseVector& d, std::span<const FeaturizedLabel> universe,
                              const WeightMatrix& W);

/// Exhaustive top-k. Throws Error(kValidation) for an empty universe or k == 0.
std::vector<ScoredLabel> predict_topk(const SparseVector& d,
                                      std::span<const FeaturizedLabel> universe,
                                      const WeightMatrix& W, std::size_t k);

/// Top-k over precomputed scores (same order as `universe`).
std::vector<ScoredLabel> top_k_from_scores(std::span<const double> scores,
                                           std::span<const FeaturizedLabel> universe,
                                           std::size_t k);

struct ModelHeader {
  std::size_t K = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t doc_vocab_checksum = 0;
  std::uint64_t label_vocab_checksum = 0;
};

std::string serialize_model(const WeightMatrix& W, const ModelHeader& header);
/// Parses a model file body; fills `header`.
WeightMatrix deserialize_model(std::string_view text, ModelHeader& header);

}  // namespace vulnlib
