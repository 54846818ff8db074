#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulnlib/corpus.hpp"
#include "vulnlib/learner.hpp"

namespace vulnlib {

/// Orders two labels of the same library by version. Components are split on
/// '.', compared numerically when both are digit strings and
/// lexicographically otherwise; the shorter list is padded with "0". A label
/// without a version is older than any versioned sibling. Throws
/// Error(kValidation) when the base names differ.
std::strong_ordering compare_versions(std::string_view a, std::string_view b);

/// Maps a label to the newer versions of the same library, newest first.
class VersionStore {
 public:
  VersionStore() = default;

  static VersionStore build(const std::map<LabelId, Label>& universe);

  /// Newer versions of `label`; empty when unknown or already newest.
  const std::vector<LabelId>& newer_versions(const LabelId& label) const;

  std::size_t size() const { return newer_.size(); }
  const std::map<LabelId, std::vector<LabelId>>& entries() const { return newer_; }

 private:
  std::map<LabelId, std::vector<LabelId>> newer_;
};

/// Fixed-capacity LRU list of labels. Index 0 is the most recently inserted.
class LruCache {
 public:
  explicit LruCache(std::size_t capacity = 300);

  /// Moves or inserts `label` at recency 0, evicting the back entry when the
  /// capacity is exceeded. Returns the evicted label, if any.
  std::optional<LabelId> insert(const LabelId& label);

  bool contains(const LabelId& label) const;
  /// Position of `label` (0 = most recent), nullopt when absent.
  std::optional<std::size_t> recency(const LabelId& label) const;

  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<LabelId>& entries() const { return order_; }

  std::string to_json() const;
  static LruCache from_json(std::string_view text);

  friend bool operator==(const LruCache&, const LruCache&) = default;

 private:
  std::size_t capacity_;
  std::vector<LabelId> order_;
};

/// Inserts a report's ground truth: most specific (versioned) labels first,
/// lexicographic within each group. The last inserted ends up at recency 0.
void insert_ground_truth(LruCache& cache, const std::set<LabelId>& labels);

struct AdjustmentParams {
  double M = 8.0;     // magnitude of the recency boost
  std::size_t i = 10; // size of the top window that is adjusted

  void validate() const;
};

/// One row of an adjusted ranking with provenance for the triage UI.
struct AdjustedLabel {
  LabelId label;
  double score = 0.0;
  double base_score = 0.0;  // relevance before adjustment
  bool in_cache = false;
  std::optional<std::size_t> recency;
  bool version_transferred = false;     // received a transferred score
  std::optional<LabelId> transferred_to; // score moved to this newer version
};

/// Score of a label outside the working set, used when a transfer targets a
/// newer version that is not in the top window.
using ScoreLookup = std::function<std::optional<double>(const LabelId&)>;

/// For every label of the top window (in order), scan its newer versions
/// newest first; at the first one resident in the cache, set its score to
/// max(its score, the old score), zero the old label and stop.
void favor_new_version(std::vector<AdjustedLabel>& working, std::size_t window,
                       const VersionStore& store, const LruCache& cache,
                       const ScoreLookup& lookup = {});

/// Mean of the `i` highest scores of `working` (fewer when the set is
/// smaller).
double mean_top_scores(const std::vector<AdjustedLabel>& working, std::size_t i);

/// Adds alpha * mean_score to every cache-resident label, alpha =
/// M / (recency + 1). Non-resident labels are untouched.
void recency_boost(std::vector<AdjustedLabel>& working, const LruCache& cache,
                   const AdjustmentParams& params, double mean_score);

/// Version transfer over the top window, then the recency boost, then a
/// re-sort (descending score, ascending id).
std::vector<AdjustedLabel> adjust(const std::vector<ScoredLabel>& top_i, const VersionStore& store,
                                  const LruCache& cache, const AdjustmentParams& params,
                                  const ScoreLookup& lookup = {});

/// Plain conversion used when adjustment is disabled.
std::vector<AdjustedLabel> unadjusted(const std::vector<ScoredLabel>& ranked, const LruCache& cache);

}  // namespace vulnlib
